//! The oracle chain behind the pseudorandomness argument, as executable
//! experiments, plus the birthday-collision distinguisher.
//!
//! Oracle 1 emits truly random states. Oracle 2 defines `f` lazily while it
//! runs the counter-assisted recurrence, raising a `Birthday` flag the first
//! time `f` is queried twice at the same point — conditioned on no birthday,
//! its output is exactly uniform, which is what makes Oracles 1 and 2
//! indistinguishable up to the ≈ k²/2n birthday probability. Oracle 3
//! materializes a uniform random table up front; Oracle 4 replaces it with
//! the keyed mixer. All transcripts are reproducible from an explicit seed.
//!
//! A transcript's states are `x_1, …, x_k` (the seed is internal), so
//! `states[m]` was produced with counter value `m+1`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::genkit::{FunctionTable, GeneratorSpec};
use crate::statespace::{LatinOp, StateSpace};
use crate::{Error, Result};

/// Cap on the table Oracle 3 materializes.
pub const DEFAULT_TABLE_GUARD: u64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    /// Independent uniform states.
    O1Random,
    /// Counter-assisted with `f` defined lazily, birthday-flagged.
    O2LazyF,
    /// Counter-assisted with a uniformly drawn explicit table.
    O3RandomTable,
    /// Counter-assisted with a randomly keyed mixer `f`.
    O4KeyedMixer,
}

/// One sampled run of an oracle.
#[derive(Debug, Clone, Serialize)]
pub struct OracleTranscript {
    pub which: OracleKind,
    pub n: u64,
    pub k: usize,
    /// `x_1, …, x_k`.
    pub states: Vec<u64>,
    /// Oracle 2 only: whether `f` was queried twice at the same point.
    pub birthday_flag: Option<bool>,
    pub rng_seed: u64,
}

/// Samples one transcript of length `k` over `{0, …, n-1}`, reproducibly
/// from `rng_seed`.
pub fn sample(which: OracleKind, n: u64, k: usize, rng_seed: u64) -> Result<OracleTranscript> {
    if n < 2 {
        return Err(Error::Domain("oracles need n >= 2".into()));
    }
    if k == 0 {
        return Err(Error::Domain("transcript length must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut birthday_flag = None;
    let states = match which {
        OracleKind::O1Random => (0..k).map(|_| rng.gen_range(0..n)).collect(),
        OracleKind::O2LazyF => {
            let mut f: HashMap<u64, u64> = HashMap::new();
            let mut birthday = false;
            let mut x = rng.gen_range(0..n);
            let mut out = Vec::with_capacity(k);
            for i in 1..=k as u64 {
                let y = match f.get(&x) {
                    Some(&y) => {
                        birthday = true;
                        y
                    }
                    None => {
                        let y = rng.gen_range(0..n);
                        f.insert(x, y);
                        y
                    }
                };
                x = (y + i % n) % n;
                out.push(x);
            }
            birthday_flag = Some(birthday);
            out
        }
        OracleKind::O3RandomTable => {
            if n > DEFAULT_TABLE_GUARD {
                return Err(Error::Guard(format!(
                    "oracle 3 materializes an n={n} table, exceeds guard {DEFAULT_TABLE_GUARD}"
                )));
            }
            let table: Vec<u64> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let seed = rng.gen_range(0..n);
            run_counter_assisted_raw(&table, n, seed, k)
        }
        OracleKind::O4KeyedMixer => {
            let mut key = vec![0u8; 16];
            rng.fill(&mut key[..]);
            let space = StateSpace::auto(n)?;
            let f = FunctionTable::keyed_mixer(space, key, 6)?;
            let seed = rng.gen_range(0..n);
            let mut out = Vec::with_capacity(k);
            let mut x = seed;
            for i in 1..=k as u64 {
                x = (f.eval(x) + i % n) % n;
                out.push(x);
            }
            out
        }
    };
    Ok(OracleTranscript {
        which,
        n,
        k,
        states,
        birthday_flag,
        rng_seed,
    })
}

fn run_counter_assisted_raw(table: &[u64], n: u64, seed: u64, k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    let mut x = seed;
    for i in 1..=k as u64 {
        x = (table[x as usize] + i % n) % n;
        out.push(x);
    }
    out
}

/// Distinguisher verdict for one transcript.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Every observed state collision satisfies the counter-assisted
    /// relation `f(x_i) = f(x_j)` recovered from the successors.
    ConsistentWithCounterAssisted,
    /// Some collision violates the relation, which a counter-assisted
    /// source can never do.
    RandomLike,
    /// No collision with successors was observed.
    Inconclusive,
}

/// Scans a transcript for state collisions `x_i = x_j` and checks whether
/// the successors are consistent with some counter-assisted source: the
/// recovered `f`-values `x_{i+1} ⋆⁻¹ (i+1)` and `x_{j+1} ⋆⁻¹ (j+1)` must
/// match (for addition: `x_{i+1} - (i+1) = x_{j+1} - (j+1) mod n`).
///
/// `states[m]` is taken to be the value produced with counter `m+1`, the
/// convention of [`sample`].
pub fn birthday_distinguisher(states: &[u64], n: u64, op: &LatinOp) -> Verdict {
    let mut by_value: HashMap<u64, Vec<usize>> = HashMap::new();
    for (idx, &v) in states.iter().enumerate() {
        by_value.entry(v).or_default().push(idx);
    }
    let mut informative = false;
    for positions in by_value.values() {
        if positions.len() < 2 {
            continue;
        }
        // Recovered f-value per collision position that has a successor.
        let mut recovered: Option<u64> = None;
        for &idx in positions {
            if idx + 1 >= states.len() {
                continue;
            }
            let counter = (idx as u64 + 2) % n; // states[idx+1] used counter idx+2
            let fval = op.invert_left_raw(n, counter, states[idx + 1]);
            match recovered {
                None => recovered = Some(fval),
                Some(prev) => {
                    informative = true;
                    if prev != fval {
                        return Verdict::RandomLike;
                    }
                }
            }
        }
    }
    if informative {
        Verdict::ConsistentWithCounterAssisted
    } else {
        Verdict::Inconclusive
    }
}

/// Verdict with the positions argument spelled out for generator runs that
/// include the seed: pass `&run[1..]` of a counter-assisted `run_states`.
pub fn distinguish_generator_run(spec: &GeneratorSpec, run: &[u64]) -> Result<Verdict> {
    match spec {
        GeneratorSpec::CounterAssisted { op, counter_start, .. } => {
            if *counter_start != 0 {
                return Err(Error::Domain(
                    "the distinguisher convention assumes counter_start = 0".into(),
                ));
            }
            Ok(birthday_distinguisher(run, spec.n(), op))
        }
        _ => Err(Error::Domain(
            "distinguish_generator_run expects a counter-assisted spec".into(),
        )),
    }
}

/// Per-oracle statistics of a distinguishing experiment.
#[derive(Debug, Clone, Serialize)]
pub struct OracleStats {
    pub oracle: OracleKind,
    /// Fraction of transcripts containing a repeated state value.
    pub collision_rate: f64,
    /// Oracle 2 only: fraction of transcripts with the birthday flag set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub birthday_flag_rate: Option<f64>,
    pub consistent: u64,
    pub random_like: u64,
    pub inconclusive: u64,
}

/// Full report of [`distinguishing_experiment`].
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub n: u64,
    pub k: usize,
    pub trials: u64,
    pub rng_seed: u64,
    /// The coarse birthday estimate k²/2n.
    pub estimate_k2_over_2n: f64,
    /// Exact probability of a collision among k uniform draws:
    /// `1 - ∏_{i=1}^{k-1} (1 - i/n)`.
    pub exact_birthday_product: f64,
    pub oracles: Vec<OracleStats>,
}

/// Runs `trials` transcripts of every oracle and judges each with the
/// birthday distinguisher. Per-trial RNG seeds are drawn from a master
/// stream seeded by `rng_seed`, so the whole experiment is replayable.
pub fn distinguishing_experiment(
    n: u64,
    k: usize,
    trials: u64,
    rng_seed: u64,
) -> Result<ExperimentReport> {
    if trials == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    let mut master = ChaCha8Rng::seed_from_u64(rng_seed);
    let op = LatinOp::AddMod;
    let mut oracles = Vec::new();
    for which in [
        OracleKind::O1Random,
        OracleKind::O2LazyF,
        OracleKind::O3RandomTable,
        OracleKind::O4KeyedMixer,
    ] {
        let mut collisions = 0u64;
        let mut flags = 0u64;
        let mut consistent = 0u64;
        let mut random_like = 0u64;
        let mut inconclusive = 0u64;
        for _ in 0..trials {
            let trial_seed = master.gen::<u64>();
            let transcript = sample(which, n, k, trial_seed)?;
            let mut seen = HashMap::new();
            let mut collided = false;
            for &v in &transcript.states {
                if seen.insert(v, ()).is_some() {
                    collided = true;
                    break;
                }
            }
            if collided {
                collisions += 1;
            }
            if transcript.birthday_flag == Some(true) {
                flags += 1;
            }
            match birthday_distinguisher(&transcript.states, n, &op) {
                Verdict::ConsistentWithCounterAssisted => consistent += 1,
                Verdict::RandomLike => random_like += 1,
                Verdict::Inconclusive => inconclusive += 1,
            }
        }
        oracles.push(OracleStats {
            oracle: which,
            collision_rate: collisions as f64 / trials as f64,
            birthday_flag_rate: (which == OracleKind::O2LazyF)
                .then(|| flags as f64 / trials as f64),
            consistent,
            random_like,
            inconclusive,
        });
    }
    Ok(ExperimentReport {
        n,
        k,
        trials,
        rng_seed,
        estimate_k2_over_2n: (k as f64 * k as f64) / (2.0 * n as f64),
        exact_birthday_product: exact_birthday_probability(n, k as u64),
        oracles,
    })
}

/// `1 - ∏_{i=1}^{k-1} (1 - i/n)`: the exact probability that k independent
/// uniform draws from n values contain a repeat.
pub fn exact_birthday_probability(n: u64, k: u64) -> f64 {
    let mut no_collision = 1.0f64;
    for i in 1..k {
        no_collision *= 1.0 - i as f64 / n as f64;
    }
    1.0 - no_collision
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genkit::{run_states, OutputFunction};

    #[test]
    fn o2_single_step_never_flags() {
        for seed in 0..50 {
            let t = sample(OracleKind::O2LazyF, 64, 1, seed).unwrap();
            assert_eq!(t.states.len(), 1);
            assert_eq!(t.birthday_flag, Some(false));
        }
    }

    #[test]
    fn o3_zero_table_is_counter_mode() {
        // With an all-zero table the recurrence degenerates to x_i = i.
        let states = run_counter_assisted_raw(&[0; 8], 8, 0, 10);
        assert_eq!(states, vec![1, 2, 3, 4, 5, 6, 7, 0, 1, 2]);
    }

    #[test]
    fn transcripts_are_reproducible() {
        for which in [
            OracleKind::O1Random,
            OracleKind::O2LazyF,
            OracleKind::O3RandomTable,
            OracleKind::O4KeyedMixer,
        ] {
            let a = sample(which, 256, 32, 77).unwrap();
            let b = sample(which, 256, 32, 77).unwrap();
            assert_eq!(a.states, b.states);
            assert!(a.states.iter().all(|&v| v < 256));
        }
    }

    #[test]
    fn counter_assisted_transcripts_judged_consistent() {
        // Exhaustive over a small space: every O3-style run that collides is
        // consistent, never random-like.
        let n = 32u64;
        for seed in 0..200 {
            let t = sample(OracleKind::O3RandomTable, n, 3 * n as usize, seed).unwrap();
            let verdict = birthday_distinguisher(&t.states, n, &LatinOp::AddMod);
            assert_ne!(verdict, Verdict::RandomLike, "seed {seed}");
        }
    }

    #[test]
    fn tail_collision_is_inconclusive() {
        let verdict = birthday_distinguisher(&[5, 5], 8, &LatinOp::AddMod);
        assert_eq!(verdict, Verdict::Inconclusive);
    }

    #[test]
    fn random_transcripts_with_violations_are_caught() {
        // x_0 = x_2 = 0 but successors recover different f-values.
        let states = vec![0u64, 3, 0, 9];
        let verdict = birthday_distinguisher(&states, 16, &LatinOp::AddMod);
        assert_eq!(verdict, Verdict::RandomLike);

        // Same collision with matching recovered values is consistent:
        // states[1] - 2 = states[3] - 4  (mod 16).
        let states = vec![0u64, 3, 0, 5];
        let verdict = birthday_distinguisher(&states, 16, &LatinOp::AddMod);
        assert_eq!(verdict, Verdict::ConsistentWithCounterAssisted);
    }

    #[test]
    fn generator_runs_distinguish_consistent() {
        let n = 64u64;
        let space = StateSpace::auto(n).unwrap();
        let f = FunctionTable::keyed_mixer(space, b"dk".to_vec(), 5).unwrap();
        let spec = GeneratorSpec::counter_assisted(
            f,
            OutputFunction::identity(space),
            LatinOp::AddMod,
            0,
        )
        .unwrap();
        for seed in 0..n {
            let run = run_states(&spec, seed, 4 * n as usize, None).unwrap();
            let verdict = distinguish_generator_run(&spec, &run[1..]).unwrap();
            assert_ne!(verdict, Verdict::RandomLike, "seed {seed}");
        }
    }

    #[test]
    fn experiment_sanity_small() {
        let report = distinguishing_experiment(256, 16, 200, 3).unwrap();
        assert!((report.estimate_k2_over_2n - 0.5).abs() < 1e-12);
        assert!(report.exact_birthday_product > 0.3 && report.exact_birthday_product < 0.5);
        for stats in &report.oracles {
            match stats.oracle {
                OracleKind::O1Random => {}
                _ => assert_eq!(stats.random_like, 0, "{:?}", stats.oracle),
            }
            if stats.oracle == OracleKind::O2LazyF {
                let rate = stats.birthday_flag_rate.unwrap();
                assert!(rate > 0.1 && rate < 0.8, "flag rate {rate}");
            }
        }
    }

    #[test]
    fn k_equals_one_has_no_birthdays() {
        let report = distinguishing_experiment(64, 1, 100, 9).unwrap();
        for stats in &report.oracles {
            assert_eq!(stats.collision_rate, 0.0);
            assert_eq!(stats.consistent + stats.random_like, 0);
        }
    }
}
