//! Pipelines on top of the embedding: an approximate metric, k-median and
//! buy-at-bulk network design.

use serde::Serialize;

use crate::engine::instances;
use crate::error::{MbfError, Result};
use crate::frt::{EmbeddingConfig, EmbeddingContext};
use crate::graph::WeightedGraph;

mod bab;
mod kmedian;

pub use bab::{buy_at_bulk, BabSolution, Cable, Demand, InstalledCable};
pub use kmedian::{
    kmedian, kmedian_candidates, kmedian_tree_dp, BinaryNode, BinaryTree, KMedianSolution,
    TreeSolution,
};

/// Largest `n` for which `approx_metric` builds the full table.
pub const METRIC_CAP: usize = 4096;

/// The metric of `H` as a dense table.
#[derive(Debug, Clone, Serialize)]
pub struct ApproxMetric {
    pub dist: Vec<Vec<f64>>,
    /// Guaranteed upper bound on `dist / dist_G`:
    /// `(1+ε̂)^{Λ+1}·(1+ε̂_hopset)`.
    pub bound: f64,
}

/// All-pairs distances of `H`, computed through the oracle.
pub fn approx_metric(g: &WeightedGraph, cfg: &EmbeddingConfig) -> Result<ApproxMetric> {
    let n = g.n();
    if n > METRIC_CAP {
        return Err(MbfError::CapExceeded {
            what: "approximate metric",
            n,
            cap: METRIC_CAP,
        });
    }
    let ctx = EmbeddingContext::new(g, cfg)?;
    let out = ctx.h.oracle_run(&instances::apsp(n))?;
    let dist = out
        .state
        .iter()
        .map(|row| (0..n).map(|w| row.get(w)).collect())
        .collect();
    let h = &ctx.h;
    let bound =
        (1.0 + h.eps_hat).powi(h.lambda() as i32 + 1) * (1.0 + h.aug.eps_hopset.unwrap_or(0.0));
    Ok(ApproxMetric { dist, bound })
}
