//! Seeded random graph families used by tests, benchmarks and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use super::WeightedGraph;
use crate::algebra::NodeId;

/// Connected graph on `n` nodes: a uniformly random recursive spanning tree
/// plus `extra` additional distinct edges, each with an integer weight drawn
/// uniformly from `[1, max_weight]`.
pub fn random_connected<R: Rng>(
    n: usize,
    extra: usize,
    max_weight: u32,
    rng: &mut R,
) -> WeightedGraph {
    let max_weight = max_weight.max(1);
    let mut perm: Vec<NodeId> = (0..n).collect();
    perm.shuffle(rng);
    let mut edges = Vec::with_capacity(n + extra);
    let mut present = std::collections::HashSet::new();
    for i in 1..n {
        let parent = perm[rng.gen_range(0..i)];
        let (u, v) = (parent.min(perm[i]), parent.max(perm[i]));
        present.insert((u, v));
        edges.push((u, v, rng.gen_range(1..=max_weight) as f64));
    }
    let possible = n * n.saturating_sub(1) / 2;
    let target = (n.saturating_sub(1) + extra).min(possible);
    while edges.len() < target {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b {
            continue;
        }
        let (u, v) = (a.min(b), a.max(b));
        if present.insert((u, v)) {
            edges.push((u, v, rng.gen_range(1..=max_weight) as f64));
        }
    }
    WeightedGraph::from_edges(n, &edges).expect("generated edges are valid")
}

/// Random connected graph with weights in `[1, n]` and about `2n` edges.
pub fn standard_instance<R: Rng>(n: usize, rng: &mut R) -> WeightedGraph {
    random_connected(n, n, n as u32, rng)
}

pub fn path(n: usize, weight: f64) -> WeightedGraph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i, weight)).collect();
    WeightedGraph::from_edges(n, &edges).expect("valid path")
}

pub fn cycle(n: usize, weight: f64) -> WeightedGraph {
    let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i, weight)).collect();
    if n > 2 {
        edges.push((n - 1, 0, weight));
    }
    WeightedGraph::from_edges(n, &edges).expect("valid cycle")
}

pub fn star(n: usize, weight: f64) -> WeightedGraph {
    let edges: Vec<_> = (1..n).map(|i| (0, i, weight)).collect();
    WeightedGraph::from_edges(n, &edges).expect("valid star")
}

pub fn complete(n: usize, weight: f64) -> WeightedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v, weight));
        }
    }
    WeightedGraph::from_edges(n, &edges).expect("valid complete graph")
}
