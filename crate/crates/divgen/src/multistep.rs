//! t-step counter-assisted mode over tuple states, and black-box output
//! hardening via Feistel rounds.
//!
//! In t-step mode the counter is combined only once every `t` iterations:
//! from the last coordinate `z` of the previous tuple, the next tuple is
//! `(f(z), f²(z), …, f^t(z) ⋆ i)`. Any two produced tuples at indices
//! `i ≠ j (mod n)` differ — equal second-to-last coordinates would force
//! different last coordinates through the counter — so the tuple sequence
//! has the maximal diversity `D(k) = k` for all `k ≤ n`.
//!
//! The dense variant instead clocks the ordinary counter-assisted generator
//! `t` times per tuple (counter incremented every clock), which by isolated
//! equality makes any two tuples at incongruent counter positions differ in
//! at least ⌊t/2⌋ coordinates.
//!
//! Runs start from a single state seed `s`; the first tuple is the start of
//! the flat stream (`(s, f(s), …, f^{t-1}(s))`, counter not yet applied).

use std::collections::HashMap;

use rand::Rng;

use crate::analysis::DiversityCurve;
use crate::genkit::{FunctionTable, OutputFunction};
use crate::orbit;
use crate::statespace::{LatinOp, StateSpace};
use crate::{Error, Result};

/// A t-step counter-assisted generator over tuple states in `X^t`.
#[derive(Debug, Clone)]
pub struct TStepSpec {
    pub f: FunctionTable,
    pub t: usize,
    pub op: LatinOp,
    pub output: TupleOutput,
    pub dense: bool,
}

/// Output function `ĝ: X^t → Y^t` of a t-step generator.
#[derive(Debug, Clone)]
pub enum TupleOutput {
    /// Identity on every coordinate.
    BlockwiseIdentity,
    /// Three keyed Feistel rounds `D_{g1} ∘ D_{g2} ∘ D_{g3}` (t = 2).
    Feistel3 {
        g1: OutputFunction,
        g2: OutputFunction,
        g3: OutputFunction,
        op: LatinOp,
    },
    /// `D_g ∘ D_g ∘ D_h` with `h` from the shift hash family (t = 2).
    Lucks { g: OutputFunction, h: ShiftHashKey },
    /// Explicit pair table over X² (t = 2).
    CustomPairs(Vec<[u64; 2]>),
}

impl TStepSpec {
    pub fn new(
        f: FunctionTable,
        t: usize,
        op: LatinOp,
        output: TupleOutput,
        dense: bool,
    ) -> Result<Self> {
        if t < 2 {
            return Err(Error::Domain(format!("t-step mode needs t >= 2, got {t}")));
        }
        op.compatible(f.space())?;
        output.check(f.space(), t)?;
        Ok(TStepSpec {
            f,
            t,
            op,
            output,
            dense,
        })
    }

    pub fn n(&self) -> u64 {
        self.f.n()
    }

    fn check_tuple(&self, tuple: &[u64]) -> Result<()> {
        if tuple.len() != self.t {
            return Err(Error::Domain(format!(
                "tuple has {} coordinates, spec says t={}",
                tuple.len(),
                self.t
            )));
        }
        for &v in tuple {
            self.f.space().check(v)?;
        }
        Ok(())
    }

    /// The tuple produced at `index` from the previous tuple's last
    /// coordinate `z`. `index` is reduced mod n.
    fn produce(&self, z: u64, index_mod_n: u64) -> Vec<u64> {
        let n = self.n();
        let t = self.t;
        let mut out = Vec::with_capacity(t);
        if self.dense {
            let mut x = z;
            for m in 0..t {
                let ctr =
                    ((index_mod_n as u128 * t as u128 + m as u128) % n as u128) as u64;
                x = self.op.apply_raw(n, self.f.eval(x), ctr);
                out.push(x);
            }
        } else {
            let mut x = z;
            for _ in 0..t {
                x = self.f.eval(x);
                out.push(x);
            }
            let last = out.last_mut().unwrap();
            *last = self.op.apply_raw(n, *last, index_mod_n);
        }
        out
    }
}

impl TupleOutput {
    fn check(&self, space: &StateSpace, t: usize) -> Result<()> {
        let n = space.n();
        match self {
            TupleOutput::BlockwiseIdentity => Ok(()),
            TupleOutput::Feistel3 { g1, g2, g3, op } => {
                if t != 2 {
                    return Err(Error::Domain("Feistel output requires t = 2".into()));
                }
                op.compatible(space)?;
                for g in [g1, g2, g3] {
                    if g.output_size() != n || g.space().n() != n {
                        return Err(Error::Domain(
                            "Feistel round functions need Y = X".into(),
                        ));
                    }
                }
                Ok(())
            }
            TupleOutput::Lucks { g, h } => {
                if t != 2 {
                    return Err(Error::Domain("Lucks output requires t = 2".into()));
                }
                if g.output_size() != n || g.space().n() != n {
                    return Err(Error::Domain("Feistel round functions need Y = X".into()));
                }
                if !n.is_power_of_two() || n != 1u64 << h.w() {
                    return Err(Error::Domain(format!(
                        "shift hash is keyed for w={} but n={n}",
                        h.w()
                    )));
                }
                Ok(())
            }
            TupleOutput::CustomPairs(table) => {
                if t != 2 {
                    return Err(Error::Domain("pair table output requires t = 2".into()));
                }
                if table.len() as u64 != n * n {
                    return Err(Error::Domain(format!(
                        "pair table needs n² = {} rows, got {}",
                        n * n,
                        table.len()
                    )));
                }
                Ok(())
            }
        }
    }
}

/// One t-step: from `tuple` at position `index - 1`, the tuple at `index`.
pub fn t_step(spec: &TStepSpec, tuple: &[u64], index: u64) -> Result<Vec<u64>> {
    spec.check_tuple(tuple)?;
    if index == 0 {
        return Err(Error::Domain(
            "step index is the position being produced and starts at 1".into(),
        ));
    }
    Ok(spec.produce(*tuple.last().unwrap(), index % spec.n()))
}

/// The initial tuple for a run from the single state seed `seed`: the first
/// `t` values of the flat stream, counter not yet combined (plain mode) or
/// combined from the second value on (dense mode).
pub fn tstep_seed_tuple(spec: &TStepSpec, seed: u64) -> Result<Vec<u64>> {
    spec.f.space().check(seed)?;
    let n = spec.n();
    let mut out = Vec::with_capacity(spec.t);
    out.push(seed);
    let mut x = seed;
    for m in 1..spec.t {
        x = if spec.dense {
            spec.op
                .apply_raw(n, spec.f.eval(x), (m as u128 % n as u128) as u64)
        } else {
            spec.f.eval(x)
        };
        out.push(x);
    }
    Ok(out)
}

/// The tuple sequence `(x̂_0, x̂_1, …, x̂_{count-1})` from a state seed.
pub fn tstep_run(spec: &TStepSpec, seed: u64, count: usize) -> Result<Vec<Vec<u64>>> {
    if count == 0 {
        return Err(Error::Domain("run length must be positive".into()));
    }
    let mut tuples = Vec::with_capacity(count);
    tuples.push(tstep_seed_tuple(spec, seed)?);
    for i in 1..count {
        let next = spec.produce(
            *tuples[i - 1].last().unwrap(),
            (i as u128 % spec.n() as u128) as u64,
        );
        tuples.push(next);
    }
    Ok(tuples)
}

/// Output tuples `ĝ(x̂_i)` of a run.
pub fn tstep_outputs(spec: &TStepSpec, seed: u64, count: usize) -> Result<Vec<Vec<u64>>> {
    tstep_run(spec, seed, count)?
        .iter()
        .map(|tuple| apply_tuple_output(&spec.output, spec.f.space(), tuple))
        .collect()
}

/// Applies a tuple output function to one tuple.
pub fn apply_tuple_output(
    output: &TupleOutput,
    space: &StateSpace,
    tuple: &[u64],
) -> Result<Vec<u64>> {
    match output {
        TupleOutput::BlockwiseIdentity => Ok(tuple.to_vec()),
        TupleOutput::Feistel3 { .. } | TupleOutput::Lucks { .. } => {
            if tuple.len() != 2 {
                return Err(Error::Domain("Feistel output requires pairs".into()));
            }
            let (l, r) = three_round_output(output, space, (tuple[0], tuple[1]))?;
            Ok(vec![l, r])
        }
        TupleOutput::CustomPairs(table) => {
            if tuple.len() != 2 {
                return Err(Error::Domain("pair table output requires pairs".into()));
            }
            let n = space.n();
            let row = table[(tuple[0] * n + tuple[1]) as usize];
            Ok(vec![row[0], row[1]])
        }
    }
}

/// One Feistel round `D_g(L, R) = (R, L ⋆ g(R))`. The combine defaults to
/// xor in the constructions; any Latin-square operation works.
pub fn feistel_round(g: &OutputFunction, l: u64, r: u64, op: &LatinOp) -> Result<(u64, u64)> {
    let space = g.space();
    if g.output_size() != space.n() {
        return Err(Error::Domain("Feistel round function needs Y = X".into()));
    }
    op.compatible(space)?;
    space.check(l)?;
    space.check(r)?;
    Ok((r, op.apply_raw(space.n(), l, g.eval(r))))
}

/// Inverse of [`feistel_round`]: recovers `(L, R)` from its image.
pub fn feistel_round_inverse(
    g: &OutputFunction,
    a: u64,
    b: u64,
    op: &LatinOp,
) -> Result<(u64, u64)> {
    let space = g.space();
    if g.output_size() != space.n() {
        return Err(Error::Domain("Feistel round function needs Y = X".into()));
    }
    op.compatible(space)?;
    space.check(a)?;
    space.check(b)?;
    // (a, b) = (R, L ⋆ g(R))
    let l = op.invert_left_raw(space.n(), g.eval(a), b);
    Ok((l, a))
}

/// Composes the three Feistel rounds of a [`TupleOutput::Feistel3`] or
/// [`TupleOutput::Lucks`] variant, rightmost round first: `D_{g1}∘D_{g2}∘D_{g3}`
/// applies `g3`'s round to the input, and `D_g∘D_g∘D_h` applies `h`'s first.
pub fn three_round_output(
    output: &TupleOutput,
    space: &StateSpace,
    pair: (u64, u64),
) -> Result<(u64, u64)> {
    match output {
        TupleOutput::Feistel3 { g1, g2, g3, op } => {
            let p = feistel_round(g3, pair.0, pair.1, op)?;
            let p = feistel_round(g2, p.0, p.1, op)?;
            feistel_round(g1, p.0, p.1, op)
        }
        TupleOutput::Lucks { g, h } => {
            space.check(pair.0)?;
            space.check(pair.1)?;
            let n = space.n();
            // D_h round with the shift hash as round function, xor combine.
            let p = (pair.1, pair.0 ^ shift_hash(h, pair.1)?);
            let p = feistel_round(g, p.0, p.1, &LatinOp::Xor)?;
            let p = feistel_round(g, p.0, p.1, &LatinOp::Xor)?;
            debug_assert!(p.0 < n && p.1 < n);
            Ok(p)
        }
        _ => Err(Error::Domain(
            "three_round_output expects a Feistel3 or Lucks output".into(),
        )),
    }
}

/// Key for the GF(2)-linear shift hash family on `w`-bit inputs: output bit
/// `i` is the inner product of the input with the key window starting at
/// bit `i`, so the key is a bit string of length `2w - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftHashKey {
    w: u32,
    bits: u128,
}

impl ShiftHashKey {
    pub fn new(w: u32, bits: u128) -> Result<Self> {
        if w == 0 || w > 63 {
            return Err(Error::Domain(format!("shift hash width must be 1..=63, got {w}")));
        }
        let key_len = 2 * w - 1;
        if bits >> key_len != 0 {
            return Err(Error::Domain(format!(
                "shift hash key must fit in {key_len} bits"
            )));
        }
        Ok(ShiftHashKey { w, bits })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        if bits.len() % 2 != 1 {
            return Err(Error::Domain(format!(
                "shift hash key length must be odd (2w-1), got {}",
                bits.len()
            )));
        }
        let w = ((bits.len() + 1) / 2) as u32;
        let mut packed = 0u128;
        for (i, &b) in bits.iter().enumerate() {
            if b {
                packed |= 1 << i;
            }
        }
        Self::new(w, packed)
    }

    pub fn random<R: Rng>(w: u32, rng: &mut R) -> Result<Self> {
        if w == 0 || w > 63 {
            return Err(Error::Domain(format!("shift hash width must be 1..=63, got {w}")));
        }
        let key_len = 2 * w - 1;
        let mask = if key_len >= 128 {
            u128::MAX
        } else {
            (1u128 << key_len) - 1
        };
        let raw = ((rng.gen::<u64>() as u128) << 64) | rng.gen::<u64>() as u128;
        Self::new(w, raw & mask)
    }

    pub fn w(&self) -> u32 {
        self.w
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }
}

/// `h_κ(x)`: bit `i` of the output is `⊕_j x_j · κ_{i+j}`, i.e. the parity
/// of `x` masked with the key window starting at bit `i`.
pub fn shift_hash(key: &ShiftHashKey, x: u64) -> Result<u64> {
    let w = key.w;
    if w < 64 && x >> w != 0 {
        return Err(Error::Domain(format!(
            "input {x} does not fit in w={w} bits"
        )));
    }
    let mask = (1u128 << w) - 1;
    let mut out = 0u64;
    for i in 0..w {
        let window = ((key.bits >> i) & mask) as u64;
        out |= (((x & window).count_ones() as u64) & 1) << i;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Exhaustive tuple diversity
// ---------------------------------------------------------------------------

fn tuple_orbit(spec: &TStepSpec, seeds: &[u64]) -> Result<orbit::OrbitGraph> {
    let n = spec.n();
    // Node keys: [0, seed, 0] for the initial tuple, [1, z, i mod n] for the
    // tuple produced from source state z at position i.
    let mut interner: HashMap<Vec<u64>, u32> = HashMap::new();
    let mut intern = move |tuple: Vec<u64>| -> u32 {
        let next = interner.len() as u32;
        *interner.entry(tuple).or_insert(next)
    };
    let spec_emit = spec.clone();
    let spec_step = spec.clone();
    let starts: Vec<Vec<u64>> = seeds.iter().map(|&s| vec![0, s, 0]).collect();
    orbit::build_orbit(
        starts,
        move |key| {
            let next = match key[0] {
                0 => {
                    let tuple = tstep_seed_tuple(&spec_step, key[1])?;
                    vec![1, *tuple.last().unwrap(), 1]
                }
                _ => {
                    let tuple = spec_step.produce(key[1], key[2]);
                    vec![1, *tuple.last().unwrap(), (key[2] + 1) % n]
                }
            };
            Ok(next)
        },
        move |key| {
            let tuple = match key[0] {
                0 => tstep_seed_tuple(&spec_emit, key[1]).expect("seed validated"),
                _ => spec_emit.produce(key[1], key[2]),
            };
            intern(tuple)
        },
        None,
    )
}

fn tuple_diversity(spec: &TStepSpec, kmax: usize, seeds: &[u64], exhaustive: bool) -> Result<DiversityCurve> {
    if kmax == 0 {
        return Err(Error::Range("kmax must be at least 1".into()));
    }
    for &s in seeds {
        spec.f.space().check(s)?;
    }
    let graph = tuple_orbit(spec, seeds)?;
    let values = orbit::min_window_curve(&graph, kmax);
    let total = orbit::min_cycle_distinct(&graph);
    Ok(DiversityCurve::from_parts(
        format!(
            "t_step(n={}, t={}, dense={})",
            spec.n(),
            spec.t,
            spec.dense
        ),
        values,
        Some(total),
        !exhaustive,
    ))
}

/// Exact diversity of the tuple sequence, exhaustively over all `n` state
/// seeds.
pub fn tstep_tuple_diversity(
    spec: &TStepSpec,
    kmax: usize,
    guard: Option<u64>,
) -> Result<DiversityCurve> {
    let n = spec.n();
    let guard = guard.unwrap_or(crate::analysis::DEFAULT_EXHAUSTIVE_GUARD);
    if n > guard {
        return Err(Error::Guard(format!(
            "exhaustive tuple diversity over n={n} seeds exceeds guard {guard}"
        )));
    }
    let seeds: Vec<u64> = (0..n).collect();
    tuple_diversity(spec, kmax, &seeds, true)
}

/// Upper bound on the tuple diversity from a sample of state seeds.
pub fn tstep_tuple_diversity_sampled(
    spec: &TStepSpec,
    kmax: usize,
    seeds: &[u64],
) -> Result<DiversityCurve> {
    if seeds.is_empty() {
        return Err(Error::Domain("need at least one seed".into()));
    }
    tuple_diversity(spec, kmax, seeds, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genkit::FnBackend;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(n: u64) -> StateSpace {
        StateSpace::auto(n).unwrap()
    }

    fn identity_f(n: u64) -> FunctionTable {
        FunctionTable::table(s(n), (0..n).collect()).unwrap()
    }

    #[test]
    fn two_step_hand_iteration() {
        let spec = TStepSpec::new(
            identity_f(4),
            2,
            LatinOp::AddMod,
            TupleOutput::BlockwiseIdentity,
            false,
        )
        .unwrap();
        assert_eq!(tstep_seed_tuple(&spec, 0).unwrap(), vec![0, 0]);
        let t1 = t_step(&spec, &[0, 0], 1).unwrap();
        assert_eq!(t1, vec![0, 1]);
        let t2 = t_step(&spec, &t1, 2).unwrap();
        assert_eq!(t2, vec![1, 3]);
        let t3 = t_step(&spec, &t2, 3).unwrap();
        assert_eq!(t3, vec![3, 2]);

        let run = tstep_run(&spec, 0, 4).unwrap();
        assert_eq!(run, vec![vec![0, 0], vec![0, 1], vec![1, 3], vec![3, 2]]);
    }

    #[test]
    fn constant_f_tuples() {
        let n = 8u64;
        let spec = TStepSpec::new(
            FunctionTable::new(s(n), FnBackend::Constant(5)).unwrap(),
            2,
            LatinOp::AddMod,
            TupleOutput::BlockwiseIdentity,
            false,
        )
        .unwrap();
        let run = tstep_run(&spec, 3, n as usize + 1).unwrap();
        let mut lasts = std::collections::HashSet::new();
        for (i, tuple) in run.iter().enumerate().skip(1).take(n as usize) {
            assert_eq!(tuple[0], 5);
            assert_eq!(tuple[1], (5 + i as u64) % n);
            lasts.insert(tuple[1]);
        }
        assert_eq!(lasts.len(), n as usize);
    }

    #[test]
    fn tuple_diversity_is_maximal() {
        let n = 32u64;
        for t in [2usize, 3] {
            for f in [
                FunctionTable::new(s(n), FnBackend::Constant(7)).unwrap(),
                FunctionTable::negation(s(n)),
            ] {
                let spec =
                    TStepSpec::new(f, t, LatinOp::AddMod, TupleOutput::BlockwiseIdentity, false)
                        .unwrap();
                let curve = tstep_tuple_diversity(&spec, n as usize, None).unwrap();
                for k in 1..=n as usize {
                    assert_eq!(curve.value(k), k as u64, "t={t} k={k}");
                }
            }
        }
    }

    #[test]
    fn dense_tuples_differ_in_enough_coordinates() {
        let n = 64u64;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let table: Vec<u64> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        for t in [2usize, 4] {
            let spec = TStepSpec::new(
                FunctionTable::table(s(n), table.clone()).unwrap(),
                t,
                LatinOp::AddMod,
                TupleOutput::BlockwiseIdentity,
                true,
            )
            .unwrap();
            for seed in [0u64, 5, 17] {
                let count = 2 * n as usize;
                let run = tstep_run(&spec, seed, count).unwrap();
                for i in 1..count {
                    for j in i + 1..count {
                        // The guarantee covers produced tuples whose flat
                        // counter positions are incongruent mod n.
                        if ((j - i) as u64 * t as u64) % n == 0 {
                            continue;
                        }
                        let differing = run[i]
                            .iter()
                            .zip(&run[j])
                            .filter(|(a, b)| a != b)
                            .count();
                        assert!(
                            differing >= t / 2,
                            "t={t} seed={seed} tuples {i},{j} differ in {differing}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn dense_diversity_below_n_over_t() {
        let n = 64u64;
        let t = 4usize;
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let table: Vec<u64> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let spec = TStepSpec::new(
            FunctionTable::table(s(n), table).unwrap(),
            t,
            LatinOp::AddMod,
            TupleOutput::BlockwiseIdentity,
            true,
        )
        .unwrap();
        let kmax = (n as usize / t) - 1;
        let curve = tstep_tuple_diversity(&spec, kmax, None).unwrap();
        for k in 1..=kmax {
            assert_eq!(curve.value(k), k as u64);
        }
    }

    #[test]
    fn feistel_round_formula() {
        let g = OutputFunction::identity(s(4));
        assert_eq!(feistel_round(&g, 0b01, 0b10, &LatinOp::Xor).unwrap(), (0b10, 0b11));

        let zero = OutputFunction::table(s(4), 4, vec![0; 4]).unwrap();
        for l in 0..4 {
            for r in 0..4 {
                assert_eq!(feistel_round(&zero, l, r, &LatinOp::Xor).unwrap(), (r, l));
            }
        }
    }

    #[test]
    fn feistel_round_inverts() {
        let n = 256u64;
        let g = OutputFunction::keyed_mixer(s(n), n, b"round".to_vec(), 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for op in [LatinOp::Xor, LatinOp::AddMod] {
            for _ in 0..100 {
                let l = rng.gen_range(0..n);
                let r = rng.gen_range(0..n);
                let (a, b) = feistel_round(&g, l, r, &op).unwrap();
                assert_eq!(feistel_round_inverse(&g, a, b, &op).unwrap(), (l, r));
            }
        }
    }

    #[test]
    fn three_rounds_fix_zero_with_identity_rounds() {
        let n = 16u64;
        // g(0) = 0 holds for the identity, so (0,0) is a fixed point.
        let g = OutputFunction::identity(s(n));
        let out = TupleOutput::Feistel3 {
            g1: g.clone(),
            g2: g.clone(),
            g3: g,
            op: LatinOp::Xor,
        };
        assert_eq!(three_round_output(&out, &s(n), (0, 0)).unwrap(), (0, 0));
    }

    #[test]
    fn three_rounds_permute_pairs() {
        let n = 16u64;
        let g1 = OutputFunction::keyed_mixer(s(n), n, b"a".to_vec(), 3).unwrap();
        let g2 = OutputFunction::keyed_mixer(s(n), n, b"b".to_vec(), 3).unwrap();
        let g3 = OutputFunction::keyed_mixer(s(n), n, b"c".to_vec(), 3).unwrap();
        let out = TupleOutput::Feistel3 { g1, g2, g3, op: LatinOp::Xor };
        let mut seen = vec![false; (n * n) as usize];
        for l in 0..n {
            for r in 0..n {
                let (a, b) = three_round_output(&out, &s(n), (l, r)).unwrap();
                let idx = (a * n + b) as usize;
                assert!(!seen[idx], "pair ({a},{b}) hit twice");
                seen[idx] = true;
            }
        }
    }

    #[test]
    fn lucks_composition_matches_manual_rounds() {
        let n = 16u64;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = ShiftHashKey::random(4, &mut rng).unwrap();
        let g = OutputFunction::table(s(n), n, vec![0; n as usize]).unwrap();
        let out = TupleOutput::Lucks { g: g.clone(), h: h.clone() };
        for l in 0..n {
            for r in 0..n {
                // Manual composition: D_h, then two zero-rounds (swaps).
                let p = (r, l ^ shift_hash(&h, r).unwrap());
                let p = feistel_round(&g, p.0, p.1, &LatinOp::Xor).unwrap();
                let expect = feistel_round(&g, p.0, p.1, &LatinOp::Xor).unwrap();
                assert_eq!(three_round_output(&out, &s(n), (l, r)).unwrap(), expect);
            }
        }
    }

    #[test]
    fn shift_hash_hand_example() {
        // w=2, key bits (κ0,κ1,κ2) = (1,0,1), x = 0b11:
        // bit0 = x0κ0 ⊕ x1κ1 = 1, bit1 = x0κ1 ⊕ x1κ2 = 1.
        let key = ShiftHashKey::from_bits(&[true, false, true]).unwrap();
        assert_eq!(shift_hash(&key, 0b11).unwrap(), 0b11);
        assert_eq!(shift_hash(&key, 0).unwrap(), 0);
    }

    #[test]
    fn shift_hash_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let key = ShiftHashKey::random(16, &mut rng).unwrap();
        for _ in 0..1000 {
            let x = rng.gen_range(0..1u64 << 16);
            let y = rng.gen_range(0..1u64 << 16);
            let hx = shift_hash(&key, x).unwrap();
            let hy = shift_hash(&key, y).unwrap();
            assert_eq!(shift_hash(&key, x ^ y).unwrap(), hx ^ hy);
        }
    }

    #[test]
    fn shift_hash_family_is_xor_universal_at_w8() {
        // For fixed d ≠ 0 and z, exactly 2^(2w-1)/2^w keys map d to z.
        let w = 8u32;
        let keys = 1u128 << (2 * w - 1);
        let expect = (keys >> w) as u64;
        for (d, z) in [(1u64, 0u64), (0x5a, 0x13), (0xff, 0xff), (0x80, 0x01)] {
            let mut count = 0u64;
            for bits in 0..keys {
                let key = ShiftHashKey::new(w, bits).unwrap();
                if shift_hash(&key, d).unwrap() == z {
                    count += 1;
                }
            }
            assert_eq!(count, expect, "d={d} z={z}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(TStepSpec::new(
            identity_f(8),
            1,
            LatinOp::AddMod,
            TupleOutput::BlockwiseIdentity,
            false
        )
        .is_err());
        assert!(ShiftHashKey::new(4, 1 << 7).is_err());
        let key = ShiftHashKey::new(4, 0b1010101).unwrap();
        assert!(shift_hash(&key, 16).is_err());
    }
}
