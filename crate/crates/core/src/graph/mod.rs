//! Undirected, positively weighted graphs, their I/O, and exact reference
//! oracles.

use std::collections::BTreeMap;

use crate::algebra::NodeId;
use crate::error::{MbfError, Result};

pub mod generate;
mod io;
pub mod oracles;

pub use io::{load_graph, parse_graph, write_graph, GraphFormat};

/// `G = (V, E, ω)` in adjacency-list form. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    adjacency: Vec<Vec<(NodeId, f64)>>,
    edge_count: usize,
}

impl WeightedGraph {
    /// Builds a validated graph. Parallel edges collapse to their minimum
    /// weight (with a warning); self-loops and non-positive or non-finite
    /// weights are rejected.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId, f64)]) -> Result<Self> {
        let mut unique: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(MbfError::InvalidGraph(format!(
                    "edge ({u}, {v}) references a node outside [0, {n})"
                )));
            }
            if u == v {
                return Err(MbfError::InvalidGraph(format!("self-loop at node {u}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(MbfError::InvalidGraph(format!(
                    "edge ({u}, {v}) has non-positive or non-finite weight {w}"
                )));
            }
            let key = (u.min(v), u.max(v));
            match unique.get_mut(&key) {
                Some(old) => {
                    log::warn!("parallel edge {key:?} collapsed to minimum weight");
                    *old = old.min(w);
                }
                None => {
                    unique.insert(key, w);
                }
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for (&(u, v), &w) in &unique {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        for list in &mut adjacency {
            list.sort_unstable_by_key(|e| e.0);
        }
        Ok(WeightedGraph {
            adjacency,
            edge_count: unique.len(),
        })
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn m(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: NodeId) -> &[(NodeId, f64)] {
        &self.adjacency[v]
    }

    pub fn weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        let list = &self.adjacency[u];
        list.binary_search_by_key(&v, |e| e.0)
            .ok()
            .map(|i| list[i].1)
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |&&(v, _)| u < v)
                .map(move |&(v, w)| (u, v, w))
        })
    }

    pub fn min_weight(&self) -> Option<f64> {
        self.edges().map(|e| e.2).reduce(f64::min)
    }

    pub fn max_weight(&self) -> Option<f64> {
        self.edges().map(|e| e.2).reduce(f64::max)
    }

    /// Connected-component label per node (labels are the smallest node id
    /// of each component).
    pub fn components(&self) -> Vec<NodeId> {
        let n = self.n();
        let mut label = vec![usize::MAX; n];
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = s;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &(w, _) in self.neighbors(v) {
                    if label[w] == usize::MAX {
                        label[w] = s;
                        stack.push(w);
                    }
                }
            }
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    pub fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(MbfError::Disconnected)
        }
    }

    /// Warns if `max ω / min ω` exceeds `n^exponent`.
    pub fn check_weight_ratio(&self, exponent: f64) -> bool {
        let (Some(lo), Some(hi)) = (self.min_weight(), self.max_weight()) else {
            return true;
        };
        let bound = (self.n().max(2) as f64).powf(exponent);
        let ok = hi / lo <= bound;
        if !ok {
            log::warn!("weight ratio {} exceeds n^{exponent} = {bound}", hi / lo);
        }
        ok
    }
}

/// The adjacency matrix of a graph, as a simple linear function on state
/// vectors, with every edge weight multiplied by `stretch`.
#[derive(Debug, Clone, Copy)]
pub struct AdjacencyOperator<'g> {
    pub graph: &'g WeightedGraph,
    pub stretch: f64,
}

impl<'g> AdjacencyOperator<'g> {
    pub fn new(graph: &'g WeightedGraph) -> Self {
        AdjacencyOperator {
            graph,
            stretch: 1.0,
        }
    }

    pub fn stretched(graph: &'g WeightedGraph, stretch: f64) -> Self {
        AdjacencyOperator { graph, stretch }
    }
}
