//! LE lists (least-element lists) through the oracle on `H`, and FRT trees
//! built from them.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{DistanceMap, Filter, NodeId, Semimodule};
use crate::engine::instances::{unit_distance_state, DistanceAlgorithm};
use crate::engine::MbfAlgorithm;
use crate::error::{MbfError, Result};
use crate::graph::WeightedGraph;
use crate::hopset::{self, HopsetConfig, HopsetStrategy};
use crate::rng::stream;
use crate::simgraph::{sample_levels, OracleTrace, SimulatedGraphH, DEFAULT_CAP_CONST};

mod stretch;
mod tree;

pub use stretch::{reconstruct_path, stretch_report, StretchReport, STRETCH_PAIR_CAP};
pub use tree::{build_frt_tree, build_frt_tree_on, FrtTree, TreeNode};

/// A uniformly random total order on the nodes (as ranks) and the scale
/// `β ∈ [1, 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomOrder {
    rank: Arc<Vec<usize>>,
    pub beta: f64,
    pub seed: u64,
}

impl RandomOrder {
    pub fn sample(n: usize, seed: u64) -> Self {
        let mut perm: Vec<NodeId> = (0..n).collect();
        perm.shuffle(&mut stream(seed, "order", 0));
        let beta = 1.0 + stream(seed, "beta", 0).gen::<f64>();
        Self::from_permutation(&perm, beta, seed)
    }

    /// `perm[r]` is the node of rank `r`.
    pub fn from_permutation(perm: &[NodeId], beta: f64, seed: u64) -> Self {
        let mut rank = vec![0; perm.len()];
        for (r, &v) in perm.iter().enumerate() {
            rank[v] = r;
        }
        RandomOrder {
            rank: Arc::new(rank),
            beta,
            seed,
        }
    }

    pub fn rank(&self, v: NodeId) -> usize {
        self.rank[v]
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }
}

/// Drops every entry `v` for which some lower-ranked `w` has `x_w ≤ x_v`.
#[derive(Debug, Clone)]
pub struct LeFilter {
    order: RandomOrder,
}

impl LeFilter {
    pub fn new(order: RandomOrder) -> Self {
        LeFilter { order }
    }
}

impl Filter<DistanceMap> for LeFilter {
    fn project(&self, x: &DistanceMap) -> DistanceMap {
        if x.len() <= 1 {
            return x.clone();
        }
        let mut by_dist: Vec<(f64, usize, NodeId)> =
            x.iter().map(|(v, d)| (d, self.order.rank(v), v)).collect();
        by_dist.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut best = usize::MAX;
        let mut kept = Vec::new();
        for (d, r, v) in by_dist {
            if r < best {
                best = r;
                kept.push((v, d));
            }
        }
        DistanceMap::from_pairs(kept)
    }
}

/// The LE-list algorithm: unit initial states at `sources` (all nodes if
/// `None`) and the LE filter.
pub fn le_algorithm(
    n: usize,
    order: &RandomOrder,
    sources: Option<&[NodeId]>,
) -> DistanceAlgorithm {
    MbfAlgorithm::new(
        "le-lists",
        Arc::new(LeFilter::new(order.clone())),
        unit_distance_state(n, sources),
    )
}

/// One node's LE list: ascending distances, strictly descending ranks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeList {
    pub node: NodeId,
    pub list: Vec<(f64, NodeId)>,
}

impl LeList {
    pub fn from_state(node: NodeId, state: &DistanceMap, order: &RandomOrder) -> Result<Self> {
        let list = state
            .sorted_by_distance()
            .into_iter()
            .map(|(v, d)| (d, v))
            .collect();
        let l = LeList { node, list };
        l.validate(order)?;
        Ok(l)
    }

    pub fn validate(&self, order: &RandomOrder) -> Result<()> {
        let bad = |reason: String| MbfError::MalformedList {
            node: self.node,
            reason,
        };
        if self.list.is_empty() {
            return Err(bad("empty list".into()));
        }
        for &(d, v) in &self.list {
            if v >= order.len() {
                return Err(bad(format!("entry {v} is not a node")));
            }
            if !(d.is_finite() && d >= 0.0) {
                return Err(bad(format!("entry {v} has distance {d}")));
            }
        }
        for pair in self.list.windows(2) {
            let ((d1, v1), (d2, v2)) = (pair[0], pair[1]);
            if !(d1 < d2) {
                return Err(bad(format!("distances not strictly increasing at {v2}")));
            }
            if order.rank(v1) <= order.rank(v2) {
                return Err(bad(format!("entry {v2} is dominated by {v1}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    /// The last (lowest-rank) entry within distance `r`.
    pub fn center_within(&self, r: f64) -> Option<(f64, NodeId)> {
        self.list.iter().take_while(|e| e.0 <= r).last().copied()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("LE lists serialise")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingConfig {
    pub seed: u64,
    /// `None` uses the default for `n`.
    pub eps_hat: Option<f64>,
    pub hopset: HopsetStrategy,
    pub d: Option<usize>,
    pub cap_const: usize,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            seed: 0,
            eps_hat: None,
            hopset: HopsetStrategy::Identity,
            d: None,
            cap_const: DEFAULT_CAP_CONST,
        }
    }
}

impl EmbeddingConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        EmbeddingConfig { seed, ..self }
    }
}

/// Everything one embedding sample needs: `H` and the random order.
#[derive(Debug, Clone)]
pub struct EmbeddingContext {
    pub h: SimulatedGraphH,
    pub order: RandomOrder,
    pub w_min: f64,
    pub w_max: f64,
}

impl EmbeddingContext {
    pub fn new(g: &WeightedGraph, cfg: &EmbeddingConfig) -> Result<Self> {
        g.require_connected()?;
        let n = g.n();
        let eps_hat = cfg.eps_hat.unwrap_or_else(|| hopset::default_eps_hat(n));
        if !(eps_hat >= 0.0 && eps_hat.is_finite()) {
            return Err(MbfError::InvalidParameter(format!(
                "ε̂ must be finite and ≥ 0, got {eps_hat}"
            )));
        }
        let aug = hopset::prepare(
            g,
            &HopsetConfig {
                strategy: cfg.hopset,
                d: cfg.d,
                eps_hat,
                seed: cfg.seed,
            },
        )?;
        let h = SimulatedGraphH::new(aug, sample_levels(n, cfg.seed), eps_hat)
            .with_cap_const(cfg.cap_const);
        Ok(EmbeddingContext {
            h,
            order: RandomOrder::sample(n, cfg.seed),
            w_min: g.min_weight().unwrap_or(1.0),
            w_max: g.max_weight().unwrap_or(1.0),
        })
    }

    pub fn n(&self) -> usize {
        self.h.n()
    }

    pub fn le_algorithm(&self, sources: Option<&[NodeId]>) -> DistanceAlgorithm {
        le_algorithm(self.n(), &self.order, sources)
    }

    fn lists_from(&self, states: &[DistanceMap]) -> Result<Vec<LeList>> {
        states
            .iter()
            .enumerate()
            .map(|(v, s)| LeList::from_state(v, s, &self.order))
            .collect()
    }

    /// LE lists of `H` with respect to `sources` (all nodes if `None`).
    pub fn le_lists(&self, sources: Option<&[NodeId]>) -> Result<Vec<LeList>> {
        let out = self.h.oracle_run(&self.le_algorithm(sources))?;
        self.lists_from(out.state.states())
    }

    pub fn le_lists_traced(&self) -> Result<(Vec<LeList>, OracleTrace)> {
        let (out, trace) = self.h.oracle_run_traced(&self.le_algorithm(None))?;
        Ok((self.lists_from(out.state.states())?, trace))
    }

    pub fn tree(&self, lists: &[LeList]) -> Result<FrtTree> {
        build_frt_tree(lists, &self.order, self.w_min, self.w_max)
    }
}

/// LE lists of `H` for the sampled order, computed through the oracle.
pub fn compute_le_lists(g: &WeightedGraph, cfg: &EmbeddingConfig) -> Result<Vec<LeList>> {
    EmbeddingContext::new(g, cfg)?.le_lists(None)
}

/// One FRT tree sample together with the LE lists it was built from.
pub fn sample_tree(g: &WeightedGraph, cfg: &EmbeddingConfig) -> Result<(FrtTree, Vec<LeList>)> {
    let ctx = EmbeddingContext::new(g, cfg)?;
    let lists = ctx.le_lists(None)?;
    Ok((ctx.tree(&lists)?, lists))
}

/// Tests `r(x ⊕ y) = r(r(x) ⊕ r(y))` and `r(s ⊙ x) = r(s ⊙ r(x))` for one
/// sample; used by the property suites.
pub fn congruence_holds<F: Filter<DistanceMap>>(
    f: &F,
    s: f64,
    x: &DistanceMap,
    y: &DistanceMap,
) -> bool {
    use crate::algebra::MinPlus;
    let sum = f.project(&<DistanceMap as Semimodule<MinPlus>>::merge(x, y));
    let sum_r = f.project(&f.project(x).merge(&f.project(y)));
    let sc = f.project(&x.scale(&MinPlus(s)));
    let sc_r = f.project(&f.project(x).scale(&MinPlus(s)));
    sum == sum_r && sc == sc_r
}
