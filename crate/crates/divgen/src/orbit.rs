//! Shared orbit graphs for exhaustive diversity analysis.
//!
//! The future of any generator position is a function of its extended state
//! (state value plus counters / nested generator states), so the runs of all
//! seeds live in one functional graph over extended states. Building that
//! graph once and scanning windows per node is equivalent to running every
//! seed until its extended state recurs, but shares the work of merged
//! orbits, which is what makes exhaustive sweeps over all `n` seeds cheap.

use std::collections::HashMap;

use crate::{Error, Result};

/// Default cap on the number of distinct extended states explored.
pub(crate) const DEFAULT_NODE_GUARD: usize = 1 << 26;

/// A functional graph over extended states. `emit[v]` is the symbol the
/// position emits (a state value, or an interned tuple id), `succ[v]` the
/// next position.
#[derive(Debug)]
pub(crate) struct OrbitGraph {
    pub emit: Vec<u32>,
    pub succ: Vec<u32>,
    pub symbol_count: usize,
}

impl OrbitGraph {
    pub fn node_count(&self) -> usize {
        self.emit.len()
    }
}

/// Explores the union of forward orbits of `starts`.
///
/// `step` maps an extended-state key to its successor key; `emit` maps a key
/// to the symbol the position emits. Both must be pure functions of the key.
pub(crate) fn build_orbit<I, FS, FE>(
    starts: I,
    mut step: FS,
    mut emit: FE,
    max_nodes: Option<usize>,
) -> Result<OrbitGraph>
where
    I: IntoIterator<Item = Vec<u64>>,
    FS: FnMut(&[u64]) -> Result<Vec<u64>>,
    FE: FnMut(&[u64]) -> u32,
{
    let max_nodes = max_nodes.unwrap_or(DEFAULT_NODE_GUARD);
    let mut ids: HashMap<Vec<u64>, u32> = HashMap::new();
    let mut emits: Vec<u32> = Vec::new();
    let mut succ: Vec<u32> = Vec::new();

    for start in starts {
        let mut key = start;
        let mut prev: Option<u32> = None;
        loop {
            if let Some(&id) = ids.get(&key) {
                if let Some(p) = prev {
                    succ[p as usize] = id;
                }
                break;
            }
            if emits.len() >= max_nodes {
                return Err(Error::Guard(format!(
                    "orbit exploration exceeded {max_nodes} extended states"
                )));
            }
            let id = emits.len() as u32;
            emits.push(emit(&key));
            succ.push(u32::MAX);
            ids.insert(key.clone(), id);
            if let Some(p) = prev {
                succ[p as usize] = id;
            }
            prev = Some(id);
            key = step(&key)?;
        }
    }

    let symbol_count = emits.iter().map(|&e| e as usize + 1).max().unwrap_or(0);
    Ok(OrbitGraph {
        emit: emits,
        succ,
        symbol_count,
    })
}

/// Exact `D(k)` for `k = 1..=kmax`: the minimum over all positions (graph
/// nodes) of the number of distinct symbols in the window of `k` consecutive
/// emissions starting there.
///
/// A node's scan stops early once its running distinct count can no longer
/// undercut the current minimum anywhere: the final curve is nondecreasing,
/// so reaching `dmin[kmax]` distinct values makes the rest of the window
/// irrelevant.
pub(crate) fn min_window_curve(graph: &OrbitGraph, kmax: usize) -> Vec<u64> {
    assert!(kmax >= 1);
    let nodes = graph.node_count();
    let mut dmin = vec![u32::MAX; kmax];
    let mut stamps = vec![0u32; graph.symbol_count];
    for v in 0..nodes {
        let epoch = v as u32 + 1;
        let mut cur = v;
        let mut distinct: u32 = 0;
        for slot in 0..kmax {
            let sym = graph.emit[cur] as usize;
            if stamps[sym] != epoch {
                stamps[sym] = epoch;
                distinct += 1;
            }
            if distinct < dmin[slot] {
                dmin[slot] = distinct;
            }
            if distinct >= dmin[kmax - 1] {
                break;
            }
            cur = graph.succ[cur] as usize;
        }
    }
    dmin.into_iter().map(u64::from).collect()
}

/// The limit of `D(k)`: the minimum over reachable cycles of the number of
/// distinct symbols on the cycle.
pub(crate) fn min_cycle_distinct(graph: &OrbitGraph) -> u64 {
    let nodes = graph.node_count();
    let mut color = vec![0u8; nodes]; // 0 new, 1 on current path, 2 done
    let mut stamps = vec![0u32; graph.symbol_count];
    let mut epoch = 0u32;
    let mut best = u64::MAX;
    let mut path: Vec<usize> = Vec::new();

    for v in 0..nodes {
        if color[v] != 0 {
            continue;
        }
        path.clear();
        let mut cur = v;
        while color[cur] == 0 {
            color[cur] = 1;
            path.push(cur);
            cur = graph.succ[cur] as usize;
        }
        if color[cur] == 1 {
            // Fresh cycle: count distinct emissions from `cur` around.
            epoch += 1;
            let mut distinct = 0u64;
            let mut w = cur;
            loop {
                let sym = graph.emit[w] as usize;
                if stamps[sym] != epoch {
                    stamps[sym] = epoch;
                    distinct += 1;
                }
                w = graph.succ[w] as usize;
                if w == cur {
                    break;
                }
            }
            best = best.min(distinct);
        }
        for &p in &path {
            color[p] = 2;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Orbit of x -> x+1 mod m from several starts, emitting the state.
    fn rotation(m: u64, starts: &[u64]) -> OrbitGraph {
        build_orbit(
            starts.iter().map(|&s| vec![s]),
            |k| Ok(vec![(k[0] + 1) % m]),
            |k| k[0] as u32,
            None,
        )
        .unwrap()
    }

    #[test]
    fn rotation_curve_is_min_k_m() {
        let g = rotation(8, &[0]);
        assert_eq!(g.node_count(), 8);
        let curve = min_window_curve(&g, 12);
        let expect: Vec<u64> = (1..=12).map(|k| k.min(8)).collect();
        assert_eq!(curve, expect);
        assert_eq!(min_cycle_distinct(&g), 8);
    }

    #[test]
    fn merged_orbits_share_nodes() {
        // x -> x/2: everything funnels into the fixed point 0.
        let g = build_orbit(
            (0..16u64).map(|s| vec![s]),
            |k| Ok(vec![k[0] / 2]),
            |k| k[0] as u32,
            None,
        )
        .unwrap();
        assert_eq!(g.node_count(), 16);
        assert_eq!(min_cycle_distinct(&g), 1);
        let curve = min_window_curve(&g, 4);
        assert_eq!(curve, vec![1, 1, 1, 1]); // windows at the fixed point
    }

    #[test]
    fn pruning_matches_naive_scan() {
        // Deterministic scrambled map with a few cycles.
        let m = 64u64;
        let f: Vec<u64> = (0..m).map(|x| (x * 37 + 11) % m).collect();
        let g = build_orbit(
            (0..m).map(|s| vec![s]),
            |k| Ok(vec![f[k[0] as usize]]),
            |k| k[0] as u32,
            None,
        )
        .unwrap();
        let kmax = 40;
        let pruned = min_window_curve(&g, kmax);

        // Naive: walk every node without the early break.
        let mut naive = vec![u64::MAX; kmax];
        for v in 0..g.node_count() {
            let mut seen = std::collections::HashSet::new();
            let mut cur = v;
            for slot in 0..kmax {
                seen.insert(g.emit[cur]);
                naive[slot] = naive[slot].min(seen.len() as u64);
                cur = g.succ[cur] as usize;
            }
        }
        assert_eq!(pruned, naive);
    }

    #[test]
    fn node_guard_refuses() {
        let err = build_orbit(
            [vec![0u64]],
            |k| Ok(vec![(k[0] + 1) % 100]),
            |k| k[0] as u32,
            Some(10),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Guard(_)));
    }
}
