use rayon::prelude::*;
use serde::Serialize;

use super::FrtTree;
use crate::algebra::NodeId;
use crate::error::{MbfError, Result};
use crate::graph::{oracles, WeightedGraph};
use crate::hopset::AugmentedGraph;
use crate::simgraph::OracleTrace;

/// Largest `n` for which all pairs are evaluated.
pub const STRETCH_PAIR_CAP: usize = 512;

#[derive(Debug, Clone, Serialize)]
pub struct StretchReport {
    pub samples: usize,
    pub pairs: usize,
    /// Mean over samples of `dist_T / dist_G`, per pair `v < w` in
    /// row-major order.
    #[serde(skip)]
    pub per_pair_mean: Vec<f64>,
    pub max_mean_ratio: f64,
    pub mean_ratio: f64,
    /// Pairs (over all samples) with `dist_T < dist_G`.
    pub domination_violations: usize,
}

impl StretchReport {
    /// Fraction of pairs whose mean ratio is at most `bound`.
    pub fn fraction_within(&self, bound: f64) -> f64 {
        if self.per_pair_mean.is_empty() {
            return 1.0;
        }
        self.per_pair_mean.iter().filter(|&&r| r <= bound).count() as f64
            / self.per_pair_mean.len() as f64
    }
}

/// Monte-Carlo estimate of the per-pair expected stretch.
pub fn stretch_report(g: &WeightedGraph, trees: &[FrtTree]) -> Result<StretchReport> {
    let n = g.n();
    if n > STRETCH_PAIR_CAP {
        return Err(MbfError::CapExceeded {
            what: "stretch report",
            n,
            cap: STRETCH_PAIR_CAP,
        });
    }
    let dist = oracles::all_pairs_dijkstra(g);
    let rows: Vec<Result<(Vec<f64>, usize)>> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut means = Vec::with_capacity(n - v - 1);
            let mut violations = 0;
            for w in v + 1..n {
                let mut sum = 0.0;
                for t in trees {
                    let dt = t.tree_distance(v, w)?;
                    if dt < dist[v][w] {
                        violations += 1;
                    }
                    sum += dt / dist[v][w];
                }
                means.push(sum / trees.len().max(1) as f64);
            }
            Ok((means, violations))
        })
        .collect();
    let mut per_pair_mean = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    let mut domination_violations = 0;
    for row in rows {
        let (means, viol) = row?;
        per_pair_mean.extend(means);
        domination_violations += viol;
    }
    let pairs = per_pair_mean.len();
    let max_mean_ratio = per_pair_mean.iter().copied().fold(0.0, f64::max);
    let mean_ratio = if pairs == 0 {
        0.0
    } else {
        per_pair_mean.iter().sum::<f64>() / pairs as f64
    };
    Ok(StretchReport {
        samples: trees.len(),
        pairs,
        per_pair_mean,
        max_mean_ratio,
        mean_ratio,
        domination_violations,
    })
}

/// Maps the tree edge from `child` to its parent to a walk in `G` from the
/// child's center to the parent's center.
///
/// Both centers are LE entries of the child's witness leaf `x`, so the
/// traced `H`-paths `x → v_i` and `x → v_{i+1}` exist; their `G′` walks are
/// joined at `x` and hop-set edges are expanded into base paths. The result
/// weighs at most `r_i + r_{i+1}`, i.e. 1.5 times the edge weight.
pub fn reconstruct_path(
    tree: &FrtTree,
    child: usize,
    trace: &OracleTrace,
    aug: &AugmentedGraph,
) -> Result<Vec<NodeId>> {
    let node = tree
        .nodes
        .get(child)
        .ok_or_else(|| MbfError::MissingTrace(format!("tree node {child} does not exist")))?;
    let parent = node
        .parent
        .ok_or_else(|| MbfError::MissingTrace("the root has no parent edge".into()))?;
    let (a, b) = (node.center, tree.nodes[parent].center);
    if a == b {
        return Ok(vec![a]);
    }
    let x = node.witness;
    let mut to_a = trace.walk(x, a)?;
    let to_b = trace.walk(x, b)?;
    to_a.reverse();
    to_a.extend_from_slice(&to_b[1..]);
    aug.expand_walk(&to_a)
}
