//! Exact reference computations. These deliberately avoid the MBF engine so
//! they can serve as independent oracles in tests.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::WeightedGraph;
use crate::algebra::{DistanceMap, NodeId, PathSet};
use crate::error::{MbfError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64, usize, NodeId);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .total_cmp(&other.0)
            .then(self.1.cmp(&other.1))
            .then(self.2.cmp(&other.2))
    }
}

/// Dijkstra on lexicographic `(distance, hops)` keys: returns, per node, the
/// exact distance and the minimum hop count of a shortest path.
pub fn dijkstra_with_hops(g: &WeightedGraph, s: NodeId) -> (Vec<f64>, Vec<usize>) {
    let n = g.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut hops = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    hops[s] = 0;
    heap.push(Reverse(Key(0.0, 0, s)));
    while let Some(Reverse(Key(d, h, v))) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for &(w, wt) in g.neighbors(v) {
            let nd = d + wt;
            if nd < dist[w] || (nd == dist[w] && h + 1 < hops[w]) {
                dist[w] = nd;
                hops[w] = h + 1;
                heap.push(Reverse(Key(nd, h + 1, w)));
            }
        }
    }
    (dist, hops)
}

/// Dense exact distances from `s` (∞ for unreachable nodes).
pub fn dijkstra_dense(g: &WeightedGraph, s: NodeId) -> Vec<f64> {
    dijkstra_with_hops(g, s).0
}

pub fn dijkstra(g: &WeightedGraph, s: NodeId) -> DistanceMap {
    DistanceMap::from_pairs(dijkstra_dense(g, s).into_iter().enumerate().collect())
}

/// Dense all-pairs distance table.
pub fn all_pairs_dijkstra(g: &WeightedGraph) -> Vec<Vec<f64>> {
    use rayon::prelude::*;
    (0..g.n())
        .into_par_iter()
        .map(|s| dijkstra_dense(g, s))
        .collect()
}

/// `dist^h(s, ·)` by `h` rounds of Bellman-Ford relaxation (stopping early
/// once a round changes nothing).
pub fn hop_limited_dense(g: &WeightedGraph, s: NodeId, h: usize) -> Vec<f64> {
    let n = g.n();
    let mut cur = vec![f64::INFINITY; n];
    cur[s] = 0.0;
    for _ in 0..h {
        let mut next = cur.clone();
        let mut changed = false;
        for v in 0..n {
            for &(w, wt) in g.neighbors(v) {
                let cand = cur[w] + wt;
                if cand < next[v] {
                    next[v] = cand;
                    changed = true;
                }
            }
        }
        cur = next;
        if !changed {
            break;
        }
    }
    cur
}

pub fn hop_limited_distances(g: &WeightedGraph, s: NodeId, h: usize) -> DistanceMap {
    DistanceMap::from_pairs(hop_limited_dense(g, s, h).into_iter().enumerate().collect())
}

/// `spd(G)`: the largest minimum hop count of a shortest path over all pairs.
pub fn shortest_path_diameter(g: &WeightedGraph) -> Result<usize> {
    g.require_connected()?;
    Ok((0..g.n())
        .map(|s| dijkstra_with_hops(g, s).1.into_iter().max().unwrap_or(0))
        .max()
        .unwrap_or(0))
}

pub const ENUMERATE_MAX_NODES: usize = 10;
pub const ENUMERATE_MAX_HOPS: usize = 6;

/// All loop-free paths starting at `v` with at most `h` hops.
pub fn enumerate_paths(g: &WeightedGraph, v: NodeId, h: usize) -> Result<PathSet> {
    if g.n() > ENUMERATE_MAX_NODES {
        return Err(MbfError::CapExceeded {
            what: "path enumeration",
            n: g.n(),
            cap: ENUMERATE_MAX_NODES,
        });
    }
    if h > ENUMERATE_MAX_HOPS {
        return Err(MbfError::InvalidParameter(format!(
            "path enumeration supports at most {ENUMERATE_MAX_HOPS} hops, got {h}"
        )));
    }
    fn walk(g: &WeightedGraph, path: &mut Vec<NodeId>, w: f64, h: usize, out: &mut PathSet) {
        out.insert(path.clone(), w);
        if path.len() > h {
            return;
        }
        let last = *path.last().unwrap();
        for &(x, wt) in g.neighbors(last) {
            if !path.contains(&x) {
                path.push(x);
                walk(g, path, w + wt, h, out);
                path.pop();
            }
        }
    }
    let mut out = PathSet::new();
    walk(g, &mut vec![v], 0.0, h, &mut out);
    Ok(out)
}

/// `width^h(s, ·)` by thresholding: the largest edge weight `t` such that
/// the subgraph of edges of weight ≥ `t` connects `s` to the node within `h`
/// hops. The source itself has width ∞, unreachable nodes width 0.
pub fn widest_hop_limited(g: &WeightedGraph, s: NodeId, h: usize) -> Vec<f64> {
    let n = g.n();
    let mut width = vec![0.0; n];
    width[s] = f64::INFINITY;
    let mut thresholds: Vec<f64> = g.edges().map(|e| e.2).collect();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    for &t in &thresholds {
        let mut hop = vec![usize::MAX; n];
        hop[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            if hop[v] >= h {
                continue;
            }
            for &(w, wt) in g.neighbors(v) {
                if wt >= t && hop[w] == usize::MAX {
                    hop[w] = hop[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        for v in 0..n {
            if hop[v] != usize::MAX && width[v] == 0.0 {
                width[v] = t;
            }
        }
    }
    width
}

/// Nodes reachable from `s` within `h` hops (breadth-first).
pub fn bfs_within(g: &WeightedGraph, s: NodeId, h: usize) -> Vec<NodeId> {
    let mut hop = vec![usize::MAX; g.n()];
    hop[s] = 0;
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        if hop[v] >= h {
            continue;
        }
        for &(w, _) in g.neighbors(v) {
            if hop[w] == usize::MAX {
                hop[w] = hop[v] + 1;
                queue.push_back(w);
            }
        }
    }
    (0..g.n()).filter(|&v| hop[v] != usize::MAX).collect()
}

/// Weight of a walk given as a node sequence, or `None` if two consecutive
/// nodes are not adjacent.
pub fn walk_weight(g: &WeightedGraph, walk: &[NodeId]) -> Option<f64> {
    walk.windows(2)
        .map(|p| g.weight(p[0], p[1]))
        .sum::<Option<f64>>()
}
