//! Exact diversity curves, functional-graph cycle structure, isolated
//! equality verification, image sizes and the theorem bound calculator.
//!
//! Diversity of a generator is measured on the *produced* state sequence
//! `(x_1, x_2, …)`: the seed `x_0` is an arbitrary input, not a value the
//! generator computed, and the lower bounds quantify computed values. Runs
//! of every seed are covered exhaustively by extending each orbit until its
//! extended state recurs.

use std::collections::HashMap;

use serde::Serialize;

use crate::genkit::{Cursor, FnBackend, FunctionTable, GeneratorSpec};
use crate::orbit::{self, OrbitGraph};
use crate::{Error, Result};

/// Default cap on `n` for exhaustive (all-seeds) analyses.
pub const DEFAULT_EXHAUSTIVE_GUARD: u64 = 1 << 16;

/// Default cap on sequence length for the pairwise isolated-equality scan.
pub const DEFAULT_ISOLATED_GUARD: usize = 1 << 17;

/// Default cap on `n` for image-size sweeps of non-table backends.
pub const DEFAULT_IMAGE_GUARD: u64 = 1 << 24;

/// `k ↦ D(k)`: the minimum number of distinct values in any window of
/// length `k`, for `k = 1..=kmax`.
#[derive(Debug, Clone, Serialize)]
pub struct DiversityCurve {
    /// What was measured (a sequence, or a generator over all seeds).
    pub subject: String,
    pub kmax: usize,
    values: Vec<u64>,
    /// The limit of `D(k)` for `k → ∞`, when the eventual behavior is known.
    pub total: Option<u64>,
    /// True when seeds were sampled rather than enumerated, in which case the
    /// curve only upper-bounds the true generator diversity.
    pub upper_bound: bool,
}

impl DiversityCurve {
    pub(crate) fn from_parts(
        subject: String,
        values: Vec<u64>,
        total: Option<u64>,
        upper_bound: bool,
    ) -> Self {
        Self::new(subject, values, total, upper_bound)
    }

    fn new(subject: String, values: Vec<u64>, total: Option<u64>, upper_bound: bool) -> Self {
        assert!(!values.is_empty());
        // Monotonicity chain: 1 ≤ D(k) ≤ D(k+1) ≤ D(k)+1.
        assert!(values[0] >= 1);
        for w in values.windows(2) {
            assert!(w[0] <= w[1] && w[1] <= w[0] + 1, "curve not 1-Lipschitz monotone");
        }
        DiversityCurve {
            subject,
            kmax: values.len(),
            values,
            total,
            upper_bound,
        }
    }

    /// `D(k)`, `k` 1-based.
    pub fn value(&self, k: usize) -> u64 {
        self.values[k - 1]
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

fn dense_ids(seq: &[u64]) -> Vec<u32> {
    let mut map: HashMap<u64, u32> = HashMap::new();
    seq.iter()
        .map(|&v| {
            let next = map.len() as u32;
            *map.entry(v).or_insert(next)
        })
        .collect()
}

/// Diversity curve of a concrete finite sequence.
///
/// Sliding-window distinct counts with element multiplicities: O(length) per
/// window size, O(length · kmax) total.
pub fn sequence_diversity(seq: &[u64], kmax: usize) -> Result<DiversityCurve> {
    if kmax == 0 {
        return Err(Error::Range("kmax must be at least 1".into()));
    }
    if kmax > seq.len() {
        return Err(Error::Range(format!(
            "kmax {kmax} exceeds sequence length {}",
            seq.len()
        )));
    }
    let ids = dense_ids(seq);
    let universe = ids.iter().map(|&v| v as usize + 1).max().unwrap_or(0);
    let mut counts = vec![0u32; universe];
    let mut values = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        counts.iter_mut().for_each(|c| *c = 0);
        let mut distinct = 0u64;
        let mut min_distinct = u64::MAX;
        for j in 0..seq.len() {
            let id = ids[j] as usize;
            if counts[id] == 0 {
                distinct += 1;
            }
            counts[id] += 1;
            if j >= k {
                let out = ids[j - k] as usize;
                counts[out] -= 1;
                if counts[out] == 0 {
                    distinct -= 1;
                }
            }
            if j + 1 >= k {
                min_distinct = min_distinct.min(distinct);
            }
        }
        values.push(min_distinct);
    }
    Ok(DiversityCurve::new(
        format!("sequence(len={})", seq.len()),
        values,
        None,
        false,
    ))
}

fn describe(spec: &GeneratorSpec) -> String {
    let name = match spec {
        GeneratorSpec::Iterative { .. } => "iterative",
        GeneratorSpec::CounterMode { .. } => "counter_mode",
        GeneratorSpec::CounterAssisted { .. } => "counter_assisted",
        GeneratorSpec::SequenceAssisted { .. } => "sequence_assisted",
        GeneratorSpec::Cascade { .. } => "cascade",
        GeneratorSpec::BadMode { .. } => "bad_mode",
    };
    format!("{name}(n={})", spec.n())
}

fn orbit_of_seeds(spec: &GeneratorSpec, seeds: &[u64]) -> Result<OrbitGraph> {
    assert!(spec.n() <= u32::MAX as u64);
    let mut starts = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let mut cursor = Cursor::start(spec, seed)?;
        cursor.advance()?; // diversity is measured from x_1 on
        starts.push(cursor.key());
    }
    orbit::build_orbit(
        starts,
        |key| {
            let mut c = Cursor::decode_key(spec, key)?;
            c.advance()?;
            Ok(c.key())
        },
        |key| key[0] as u32,
        None,
    )
}

fn diversity_over_seeds(
    spec: &GeneratorSpec,
    kmax: usize,
    seeds: &[u64],
    exhaustive: bool,
) -> Result<DiversityCurve> {
    if kmax == 0 {
        return Err(Error::Range("kmax must be at least 1".into()));
    }
    if spec.has_finite_assist() {
        // Finite assist: no eventual behavior to converge to; minimize the
        // plain window curves of the finite produced runs.
        let mut min_values: Option<Vec<u64>> = None;
        for &seed in seeds {
            let mut cursor = Cursor::start(spec, seed)?;
            let mut produced = Vec::new();
            loop {
                match cursor.advance() {
                    Ok(()) => produced.push(cursor.state()),
                    Err(Error::AssistExhausted { .. }) => break,
                    Err(e) => return Err(e),
                }
            }
            if produced.len() < kmax {
                return Err(Error::Range(format!(
                    "kmax {kmax} exceeds the {} produced states the assist allows",
                    produced.len()
                )));
            }
            let curve = sequence_diversity(&produced, kmax)?;
            min_values = Some(match min_values {
                None => curve.values().to_vec(),
                Some(acc) => acc
                    .iter()
                    .zip(curve.values())
                    .map(|(&a, &b)| a.min(b))
                    .collect(),
            });
        }
        return Ok(DiversityCurve::new(
            describe(spec),
            min_values.expect("at least one seed"),
            None,
            !exhaustive,
        ));
    }

    let graph = orbit_of_seeds(spec, seeds)?;
    let values = orbit::min_window_curve(&graph, kmax);
    let total = orbit::min_cycle_distinct(&graph);
    Ok(DiversityCurve::new(
        describe(spec),
        values,
        Some(total),
        !exhaustive,
    ))
}

/// Exact generator diversity `D_G(k) = min over seeds of D_{G(s)}(k)`,
/// enumerated over all `n` seeds, each run extended until its extended state
/// (state plus counter or nested generator state) recurs.
///
/// Refused when `n` exceeds `guard` (default [`DEFAULT_EXHAUSTIVE_GUARD`]);
/// use [`generator_diversity_sampled`] to get a labeled upper bound instead.
pub fn generator_diversity(
    spec: &GeneratorSpec,
    kmax: usize,
    guard: Option<u64>,
) -> Result<DiversityCurve> {
    let n = spec.n();
    let guard = guard.unwrap_or(DEFAULT_EXHAUSTIVE_GUARD);
    if n > guard {
        return Err(Error::Guard(format!(
            "exhaustive diversity over n={n} seeds exceeds guard {guard}; \
             raise the guard or sample seeds for a labeled upper bound"
        )));
    }
    let seeds: Vec<u64> = (0..n).collect();
    diversity_over_seeds(spec, kmax, &seeds, true)
}

/// Upper bound on the generator diversity from a sample of seeds. The
/// resulting curve is marked `upper_bound`; a min over sampled seeds can
/// never certify the min over all seeds.
pub fn generator_diversity_sampled(
    spec: &GeneratorSpec,
    kmax: usize,
    seeds: &[u64],
) -> Result<DiversityCurve> {
    if seeds.is_empty() {
        return Err(Error::Domain("need at least one seed".into()));
    }
    diversity_over_seeds(spec, kmax, seeds, false)
}

/// Per-seed tail and period plus the cycle decomposition of `f`.
#[derive(Debug, Clone, Serialize)]
pub struct CycleReport {
    /// Length of the shortest cycle of `f`.
    pub p_min: u64,
    pub cycles: Vec<CycleInfo>,
    pub seeds: Vec<SeedOrbit>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CycleInfo {
    pub length: u64,
    /// Smallest state on the cycle.
    pub representative: u64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeedOrbit {
    pub seed: u64,
    /// Steps before the orbit enters its cycle.
    pub tail: u64,
    pub period: u64,
}

/// Full functional-graph decomposition of `f` by pointer chasing with
/// visitation marking, O(n). Exact by construction; no probabilistic cycle
/// detection is involved.
pub fn cycle_structure(f: &FunctionTable, guard: Option<u64>) -> Result<CycleReport> {
    let n = f.n();
    let guard = guard.unwrap_or(DEFAULT_EXHAUSTIVE_GUARD);
    if n > guard {
        return Err(Error::Guard(format!(
            "cycle decomposition materializes n={n} states, exceeds guard {guard}"
        )));
    }
    let succ = f.materialize(Some(guard))?;
    let un = n as usize;
    let mut state = vec![0u8; un]; // 0 new, 1 on path, 2 resolved
    let mut tail = vec![0u64; un];
    let mut period = vec![0u64; un];
    let mut path_pos = vec![0usize; un];
    let mut cycles = Vec::new();
    let mut path: Vec<usize> = Vec::new();

    for v in 0..un {
        if state[v] != 0 {
            continue;
        }
        path.clear();
        let mut cur = v;
        while state[cur] == 0 {
            state[cur] = 1;
            path_pos[cur] = path.len();
            path.push(cur);
            cur = succ[cur] as usize;
        }
        if state[cur] == 1 {
            // Found a fresh cycle entered at path position q.
            let q = path_pos[cur];
            let len = (path.len() - q) as u64;
            let representative = path[q..].iter().map(|&u| u as u64).min().unwrap();
            cycles.push(CycleInfo {
                length: len,
                representative,
            });
            for &u in &path[q..] {
                tail[u] = 0;
                period[u] = len;
            }
            for (idx, &u) in path[..q].iter().enumerate() {
                tail[u] = (q - idx) as u64;
                period[u] = len;
            }
        } else {
            // Attached to an already resolved node.
            let base_tail = tail[cur];
            let p = period[cur];
            let len = path.len();
            for (idx, &u) in path.iter().enumerate() {
                tail[u] = base_tail + (len - idx) as u64;
                period[u] = p;
            }
        }
        for &u in &path {
            state[u] = 2;
        }
    }

    let p_min = cycles.iter().map(|c| c.length).min().expect("n >= 1");
    let seeds = (0..un)
        .map(|s| SeedOrbit {
            seed: s as u64,
            tail: tail[s],
            period: period[s],
        })
        .collect();
    Ok(CycleReport {
        p_min,
        cycles,
        seeds,
    })
}

/// Finds every violation of the isolated equality property in `seq`:
/// positions `i < j` with `x_i = x_j` (and `i ≠ j mod modulus`, when a
/// modulus is given) whose successors or predecessors are also equal.
///
/// An empty list means the property holds. Pairwise within equal-value
/// groups, O(L²) worst case, guarded.
pub fn isolated_equality_check(
    seq: &[u64],
    modulus: Option<u64>,
    guard: Option<usize>,
) -> Result<Vec<(usize, usize)>> {
    let guard = guard.unwrap_or(DEFAULT_ISOLATED_GUARD);
    if seq.len() > guard {
        return Err(Error::Guard(format!(
            "isolated-equality scan over {} positions exceeds guard {guard}",
            seq.len()
        )));
    }
    let mut groups: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, &v) in seq.iter().enumerate() {
        groups.entry(v).or_default().push(i);
    }
    let mut violations = Vec::new();
    for positions in groups.values() {
        for (a, &i) in positions.iter().enumerate() {
            for &j in &positions[a + 1..] {
                if let Some(n) = modulus {
                    if (j - i) as u64 % n == 0 {
                        continue; // the property only constrains i ≠ j (mod n)
                    }
                }
                let succ_equal = j + 1 < seq.len() && seq[i + 1] == seq[j + 1];
                let pred_equal = i >= 1 && seq[i - 1] == seq[j - 1];
                if succ_equal || pred_equal {
                    violations.push((i, j));
                }
            }
        }
    }
    violations.sort_unstable();
    Ok(violations)
}

fn ceil_sqrt(m: u64) -> u64 {
    let r = m.isqrt();
    if r * r < m {
        r + 1
    } else {
        r
    }
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// The provable lower bounds for a counter-assisted generator:
/// `γ(k) = ⌈√(k-1)⌉` (isolated-equality pair counting) and
/// `η(k) = ⌈k/|Im f|⌉` (distinct counter values), both saturating at `k = n`.
/// Ceilings are valid because diversity is integral.
pub fn theorem_bounds(k: u64, n: u64, image_size: u64) -> (u64, u64) {
    assert!(k >= 1, "window length starts at 1");
    assert!(
        (1..=n).contains(&image_size),
        "image size must be in 1..=n"
    );
    let gamma = if k <= n {
        ceil_sqrt(k - 1)
    } else {
        ceil_sqrt(n)
    };
    let eta = ceil_div(k.min(n), image_size);
    (gamma, eta)
}

/// Exact `|Im(f)|`, or `None` when a non-table backend would need a sweep
/// over more than `guard` states (default [`DEFAULT_IMAGE_GUARD`]).
pub fn image_size(f: &FunctionTable, guard: Option<u64>) -> Option<u64> {
    if let Some(cached) = f.cached_image_size() {
        return Some(cached);
    }
    let n = f.n();
    match f.backend() {
        FnBackend::Constant(_) => Some(1),
        FnBackend::Negation => Some(n),
        FnBackend::Affine { mul, .. } => Some(n / gcd(*mul, n)),
        FnBackend::Table(t) => {
            let mut seen = vec![false; n as usize];
            let mut count = 0u64;
            for &v in t {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    count += 1;
                }
            }
            Some(count)
        }
        FnBackend::KeyedMixer { .. } => {
            let guard = guard.unwrap_or(DEFAULT_IMAGE_GUARD);
            if n > guard {
                return None;
            }
            let mut seen = vec![false; n as usize];
            let mut count = 0u64;
            for x in 0..n {
                let v = f.eval(x) as usize;
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                }
            }
            Some(count)
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if a == 0 {
        b
    } else {
        gcd(b % a, a)
    }
}

/// `max_k D(k)/√k` — the quantity the √k-envelope question asks about. A
/// construction family keeping this bounded for all k simultaneously is not
/// known; this is the measurement hook for searching.
pub fn max_sqrt_ratio(curve: &DiversityCurve) -> f64 {
    curve
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| v as f64 / ((i + 1) as f64).sqrt())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genkit::{run_states, AssistSource, OutputFunction};
    use crate::statespace::{LatinOp, StateSpace};

    fn s(n: u64) -> StateSpace {
        StateSpace::auto(n).unwrap()
    }

    fn id_out(n: u64) -> OutputFunction {
        OutputFunction::identity(s(n))
    }

    #[test]
    fn sequence_examples() {
        let curve = sequence_diversity(&[0, 1, 0, 1, 0], 5).unwrap();
        assert_eq!(curve.values(), &[1, 2, 2, 2, 2]);

        let curve = sequence_diversity(&[7, 7, 7], 3).unwrap();
        assert_eq!(curve.values(), &[1, 1, 1]);

        // The self-loop makes one length-2 window constant, so D(2) = 1.
        let eulerian = [0u64, 0, 1, 1, 0];
        let curve = sequence_diversity(&eulerian, 5).unwrap();
        assert_eq!(curve.values(), &[1, 1, 2, 2, 2]);
        assert!(isolated_equality_check(&eulerian, None, None)
            .unwrap()
            .is_empty());

        assert!(matches!(
            sequence_diversity(&[1, 2], 3),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn generator_diversity_rotation() {
        let f = FunctionTable::table(s(8), (0..8).map(|x| (x + 1) % 8).collect()).unwrap();
        let spec = GeneratorSpec::iterative(f, id_out(8)).unwrap();
        let curve = generator_diversity(&spec, 12, None).unwrap();
        let expect: Vec<u64> = (1..=12).map(|k| (k as u64).min(8)).collect();
        assert_eq!(curve.values(), &expect[..]);
        assert_eq!(curve.total, Some(8));
        assert!(!curve.upper_bound);
    }

    #[test]
    fn generator_diversity_constant() {
        let spec = GeneratorSpec::iterative(
            FunctionTable::constant(s(16), 3).unwrap(),
            id_out(16),
        )
        .unwrap();
        let curve = generator_diversity(&spec, 8, None).unwrap();
        assert!(curve.values().iter().all(|&v| v == 1));
        assert_eq!(curve.total, Some(1));
    }

    #[test]
    fn generator_diversity_matches_per_seed_runs() {
        // Independent oracle: extend every seed until its (state, counter)
        // pair recurs and take pointwise minima of plain window curves over
        // the produced states.
        let n = 32u64;
        let table: Vec<u64> = (0..n).map(|x| (x * 17 + 5) % 23 % n).collect();
        let spec = GeneratorSpec::counter_assisted(
            FunctionTable::table(s(n), table).unwrap(),
            id_out(n),
            LatinOp::AddMod,
            0,
        )
        .unwrap();
        let kmax = 20usize;

        let mut naive: Vec<u64> = vec![u64::MAX; kmax];
        for seed in 0..n {
            let mut seen = std::collections::HashSet::new();
            let mut states = run_states(&spec, seed, 1, None).unwrap();
            let mut cursor_len = 1usize;
            // grow until (state, counter mod n) recurs
            loop {
                let state = *states.last().unwrap();
                let ctr = (cursor_len as u64 - 1) % n;
                if !seen.insert((state, ctr)) {
                    break;
                }
                cursor_len += 1;
                states = run_states(&spec, seed, cursor_len, None).unwrap();
            }
            let full = run_states(&spec, seed, cursor_len + kmax, None).unwrap();
            let produced = &full[1..];
            let curve = sequence_diversity(produced, kmax).unwrap();
            for (acc, &v) in naive.iter_mut().zip(curve.values()) {
                *acc = (*acc).min(v);
            }
        }

        let curve = generator_diversity(&spec, kmax, None).unwrap();
        assert_eq!(curve.values(), &naive[..]);
    }

    #[test]
    fn exhaustive_guard_refuses() {
        let spec = GeneratorSpec::counter_mode(id_out(1 << 10), LatinOp::AddMod, 1, 0).unwrap();
        assert!(matches!(
            generator_diversity(&spec, 4, Some(512)),
            Err(Error::Guard(_))
        ));
        let sampled = generator_diversity_sampled(&spec, 4, &[0, 1, 2]).unwrap();
        assert!(sampled.upper_bound);
    }

    #[test]
    fn finite_assist_diversity() {
        let spec = GeneratorSpec::sequence_assisted(
            FunctionTable::constant(s(8), 0).unwrap(),
            id_out(8),
            LatinOp::AddMod,
            AssistSource::Explicit(vec![0, 1, 2, 3, 4, 5, 6, 7]),
        )
        .unwrap();
        // produced states are c_1..c_7 = 1..7
        let curve = generator_diversity(&spec, 4, None).unwrap();
        assert_eq!(curve.values(), &[1, 2, 3, 4]);
        assert_eq!(curve.total, None);
        assert!(matches!(
            generator_diversity(&spec, 8, None),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn cycle_structure_rotation_and_constant() {
        let f = FunctionTable::table(s(8), (0..8).map(|x| (x + 1) % 8).collect()).unwrap();
        let report = cycle_structure(&f, None).unwrap();
        assert_eq!(report.p_min, 8);
        assert_eq!(report.cycles.len(), 1);
        assert!(report.seeds.iter().all(|o| o.tail == 0 && o.period == 8));

        let c = FunctionTable::constant(s(8), 3).unwrap();
        let report = cycle_structure(&c, None).unwrap();
        assert_eq!(report.p_min, 1);
        for o in &report.seeds {
            if o.seed == 3 {
                assert_eq!((o.tail, o.period), (0, 1));
            } else {
                assert_eq!((o.tail, o.period), (1, 1));
            }
        }
    }

    #[test]
    fn iterative_diversity_equals_min_k_pmin() {
        // Deterministically scrambled table at n = 2^10.
        let n = 1u64 << 10;
        let table: Vec<u64> = (0..n)
            .map(|x| (x.wrapping_mul(2654435761) >> 7) % n)
            .collect();
        let f = FunctionTable::table(s(n), table).unwrap();
        let report = cycle_structure(&f, None).unwrap();
        let spec = GeneratorSpec::iterative(f, id_out(n)).unwrap();
        let curve = generator_diversity(&spec, 64, None).unwrap();
        for k in 1..=64u64 {
            assert_eq!(curve.value(k as usize), k.min(report.p_min));
        }
    }

    #[test]
    fn isolated_equality_examples() {
        assert_eq!(
            isolated_equality_check(&[5, 5, 5], Some(8), None).unwrap(),
            vec![(0, 1), (1, 2)]
        );
        // Equal positions congruent mod n are exempt.
        let n = 4u64;
        let seq = [1u64, 2, 3, 4, 1, 2, 3, 4];
        assert!(isolated_equality_check(&seq, Some(n), None)
            .unwrap()
            .is_empty());
        // …but not with plain index inequality.
        assert!(!isolated_equality_check(&seq, None, None).unwrap().is_empty());
    }

    #[test]
    fn counter_assisted_runs_have_isolated_equality() {
        let n = 64u64;
        let table: Vec<u64> = (0..n).map(|x| (x * 3 + 1) % 17 % n).collect();
        let spec = GeneratorSpec::counter_assisted(
            FunctionTable::table(s(n), table).unwrap(),
            id_out(n),
            LatinOp::AddMod,
            0,
        )
        .unwrap();
        for seed in 0..n {
            let states = run_states(&spec, seed, 300, None).unwrap();
            assert!(isolated_equality_check(&states, Some(n), None)
                .unwrap()
                .is_empty());
        }
    }

    #[test]
    fn theorem_bounds_examples() {
        assert_eq!(theorem_bounds(10, 16, 16), (3, 1));
        assert_eq!(theorem_bounds(10, 16, 1), (3, 10));
        let n = 16u64;
        let (gamma, _) = theorem_bounds(n + 5, n, n);
        assert_eq!(gamma, 4); // plateau at ⌈√n⌉
        assert_eq!(theorem_bounds(1, 8, 4), (0, 1));
    }

    #[test]
    fn image_sizes() {
        assert_eq!(image_size(&FunctionTable::constant(s(64), 5).unwrap(), None), Some(1));
        assert_eq!(image_size(&FunctionTable::negation(s(64)), None), Some(64));
        let perm = FunctionTable::table(s(8), vec![3, 6, 0, 5, 7, 2, 4, 1]).unwrap();
        assert_eq!(image_size(&perm, None), Some(8));
        // Affine closed form vs table sweep.
        let aff = FunctionTable::affine(s(12), 8, 5).unwrap();
        let table = FunctionTable::table(s(12), aff.materialize(None).unwrap()).unwrap();
        assert_eq!(image_size(&aff, None), image_size(&table, None));

        // Independent second pass over a scrambled table.
        let n = 1u64 << 12;
        let entries: Vec<u64> = (0..n).map(|x| x.wrapping_mul(48271) % 65537 % n).collect();
        let expected = entries
            .iter()
            .collect::<std::collections::HashSet<_>>()
            .len() as u64;
        let f = FunctionTable::table(s(n), entries).unwrap();
        assert_eq!(image_size(&f, None), Some(expected));

        // Mixer backends sweep under the guard, refuse above it.
        let mixer = FunctionTable::keyed_mixer(s(256), b"img".to_vec(), 4).unwrap();
        assert!(image_size(&mixer, None).is_some());
        assert_eq!(image_size(&mixer, Some(16)), None);
    }

    #[test]
    fn sqrt_ratio_harness() {
        let curve = sequence_diversity(&[0, 1, 2, 3, 4, 5, 6, 7], 8).unwrap();
        let r = max_sqrt_ratio(&curve);
        assert!((r - (8.0f64 / 8.0f64.sqrt())).abs() < 1e-12);
    }
}
