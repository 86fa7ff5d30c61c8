use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::NodeId;
use crate::error::{MbfError, Result};
use crate::frt::{reconstruct_path, EmbeddingConfig, EmbeddingContext};
use crate::graph::WeightedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Demand {
    pub s: NodeId,
    pub t: NodeId,
    pub amount: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cable {
    pub capacity: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InstalledCable {
    pub u: NodeId,
    pub v: NodeId,
    pub cable: usize,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BabSolution {
    /// Sorted by `(u, v, cable)` with `u < v`.
    pub edges: Vec<InstalledCable>,
    /// `Σ ω(e)·c_i·multiplicity` over the installation in `G`.
    pub cost: f64,
    /// The same sum over the tree solution.
    #[serde(skip)]
    pub tree_cost: f64,
    /// The walk in `G` each demand is routed along.
    #[serde(skip)]
    pub routes: Vec<Vec<NodeId>>,
}

impl BabSolution {
    /// Installed capacity on `{u, v}`.
    pub fn capacity(&self, cables: &[Cable], u: NodeId, v: NodeId) -> f64 {
        let (u, v) = (u.min(v), u.max(v));
        self.edges
            .iter()
            .filter(|e| e.u == u && e.v == v)
            .map(|e| cables[e.cable].capacity * e.multiplicity as f64)
            .sum()
    }
}

/// Cheapest single cable type for `flow`: minimizes `c_i·⌈flow/u_i⌉`, ties
/// to the smaller index.
fn pick_cable(cables: &[Cable], flow: f64) -> (usize, u64) {
    let mut best = (0, 0, f64::INFINITY);
    for (i, c) in cables.iter().enumerate() {
        let mult = (flow / c.capacity).ceil() as u64;
        let price = c.cost * mult as f64;
        if price < best.2 {
            best = (i, mult, price);
        }
    }
    (best.0, best.1)
}

fn validate(n: usize, demands: &[Demand], cables: &[Cable]) -> Result<()> {
    if cables.is_empty() {
        return Err(MbfError::InvalidParameter(
            "at least one cable type is required".into(),
        ));
    }
    for (i, c) in cables.iter().enumerate() {
        if !(c.capacity > 0.0 && c.capacity.is_finite() && c.cost >= 0.0 && c.cost.is_finite()) {
            return Err(MbfError::InvalidParameter(format!(
                "cable {i} needs positive capacity and non-negative cost"
            )));
        }
    }
    for d in demands {
        if d.s >= n {
            return Err(MbfError::UnknownNode(d.s));
        }
        if d.t >= n {
            return Err(MbfError::UnknownNode(d.t));
        }
        if !(d.amount >= 0.0 && d.amount.is_finite()) {
            return Err(MbfError::InvalidParameter(format!(
                "demand amount must be finite and non-negative, got {}",
                d.amount
            )));
        }
    }
    Ok(())
}

/// Routes all demands on one FRT tree, buys cables per tree edge and
/// installs them along the reconstructed paths in `g`.
pub fn buy_at_bulk(
    g: &WeightedGraph,
    demands: &[Demand],
    cables: &[Cable],
    cfg: &EmbeddingConfig,
) -> Result<BabSolution> {
    validate(g.n(), demands, cables)?;
    if demands.iter().all(|d| d.s == d.t || d.amount == 0.0) {
        return Ok(BabSolution {
            edges: Vec::new(),
            cost: 0.0,
            tree_cost: 0.0,
            routes: demands.iter().map(|d| vec![d.s]).collect(),
        });
    }
    let ctx = EmbeddingContext::new(g, cfg)?;
    let (lists, trace) = ctx.le_lists_traced()?;
    let tree = ctx.tree(&lists)?;

    let mut flow = vec![0.0; tree.len()];
    let mut paths = Vec::with_capacity(demands.len());
    for d in demands {
        let p = tree.path_edges(d.s, d.t)?;
        for &e in &p {
            flow[e] += d.amount;
        }
        paths.push(p);
    }

    let mut walks: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
    let mut installed: BTreeMap<(NodeId, NodeId, usize), u64> = BTreeMap::new();
    let mut tree_cost = 0.0;
    for (e, &d_e) in flow.iter().enumerate() {
        if d_e <= 0.0 {
            continue;
        }
        let (cable, mult) = pick_cable(cables, d_e);
        tree_cost += tree.nodes[e].weight * cables[cable].cost * mult as f64;
        let walk = reconstruct_path(&tree, e, &trace, &ctx.h.aug)?;
        for pair in walk.windows(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            *installed.entry((a, b, cable)).or_default() += mult;
        }
        walks.insert(e, walk);
    }

    let mut cost = 0.0;
    let edges: Vec<InstalledCable> = installed
        .into_iter()
        .map(|((u, v, cable), multiplicity)| {
            let w = g.weight(u, v).expect("reconstructed walks use graph edges");
            cost += w * cables[cable].cost * multiplicity as f64;
            InstalledCable {
                u,
                v,
                cable,
                multiplicity,
            }
        })
        .collect();

    let routes = demands
        .iter()
        .zip(&paths)
        .map(|(d, p)| {
            // The first half of the tree path climbs (child → parent), the
            // second half descends.
            let half = p.len() / 2;
            let mut route = vec![d.s];
            for (i, e) in p.iter().enumerate() {
                let mut w = walks.get(e).cloned().unwrap_or_default();
                if i >= half {
                    w.reverse();
                }
                route.extend(w.into_iter().skip(1));
            }
            route
        })
        .collect();

    Ok(BabSolution {
        edges,
        cost,
        tree_cost,
        routes,
    })
}
