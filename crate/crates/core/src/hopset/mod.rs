//! `(d, ε̂)`-hop sets: extra edges that make `d`-hop distances approximate
//! true distances, with provenance paths back into the base graph.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use rand::seq::index::sample;
use rayon::prelude::*;

use crate::algebra::NodeId;
use crate::error::{MbfError, Result};
use crate::graph::{oracles, WeightedGraph};
use crate::rng::stream;

/// Largest graph `verify_hopset` accepts.
pub const VERIFY_CAP: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopsetStrategy {
    /// `G′ = G`; a valid `(n − 1, 0)`-hop set.
    Identity,
    /// Hub-to-neighbourhood shortcuts from truncated Dijkstra runs.
    ClusterShortcut,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopsetConfig {
    pub strategy: HopsetStrategy,
    /// Target hop bound; `None` picks the strategy default.
    pub d: Option<usize>,
    pub eps_hat: f64,
    pub seed: u64,
}

impl HopsetConfig {
    pub fn identity() -> Self {
        HopsetConfig {
            strategy: HopsetStrategy::Identity,
            d: None,
            eps_hat: 0.0,
            seed: 0,
        }
    }
}

fn log2_ceil(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// `⌈log₂ n⌉`, at least 1.
pub fn log2n(n: usize) -> usize {
    log2_ceil(n).max(1)
}

/// `min(n − 1, 4⌈log₂ n⌉²)`, at least 1.
pub fn default_d(n: usize) -> usize {
    let l = log2n(n);
    (4 * l * l).min(n.saturating_sub(1)).max(1)
}

/// `1/⌈log₂ n⌉²` rounded down to a power of two, so that powers of
/// `1 + ε̂` stay exactly representable for a while.
pub fn default_eps_hat(n: usize) -> f64 {
    let l = log2n(n);
    let e = log2_ceil(l * l);
    0.5f64.powi(e as i32)
}

/// A hop-set edge together with the base-graph path it stands for.
#[derive(Debug, Clone, PartialEq)]
pub struct Shortcut {
    pub u: NodeId,
    pub v: NodeId,
    pub weight: f64,
    /// Base-graph path from `u` to `v`.
    pub path: Vec<NodeId>,
}

/// `G′ = G ∪ extras`.
#[derive(Debug, Clone)]
pub struct AugmentedGraph {
    pub base: WeightedGraph,
    pub combined: WeightedGraph,
    pub extras: Vec<Shortcut>,
    /// Hop bound the hop set is meant for.
    pub d: usize,
    /// Measured `ε̂` of the hop set for `d`, if verified (0 for exact).
    pub eps_hopset: Option<f64>,
    index: HashMap<(NodeId, NodeId), usize>,
}

impl AugmentedGraph {
    /// `G′ = G` with `d = n − 1`, which is exact.
    pub fn identity(g: &WeightedGraph) -> Self {
        AugmentedGraph {
            base: g.clone(),
            combined: g.clone(),
            extras: Vec::new(),
            d: g.n().saturating_sub(1).max(1),
            eps_hopset: Some(0.0),
            index: HashMap::new(),
        }
    }

    fn with_extras(g: &WeightedGraph, extras: Vec<Shortcut>, d: usize) -> Self {
        let mut edges: BTreeMap<(NodeId, NodeId), f64> =
            g.edges().map(|(u, v, w)| ((u, v), w)).collect();
        let mut index = HashMap::new();
        for (i, s) in extras.iter().enumerate() {
            let key = (s.u.min(s.v), s.u.max(s.v));
            edges.insert(key, s.weight);
            index.insert(key, i);
        }
        let list: Vec<_> = edges.into_iter().map(|((u, v), w)| (u, v, w)).collect();
        let combined = WeightedGraph::from_edges(g.n(), &list).expect("augmented graph is valid");
        AugmentedGraph {
            base: g.clone(),
            combined,
            extras,
            d,
            eps_hopset: None,
            index,
        }
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn shortcut(&self, u: NodeId, v: NodeId) -> Option<&Shortcut> {
        self.index
            .get(&(u.min(v), u.max(v)))
            .map(|&i| &self.extras[i])
    }

    /// The base-graph path realising the `G′` edge `{u, v}`, oriented from
    /// `u` to `v`.
    pub fn expand_edge(&self, u: NodeId, v: NodeId) -> Result<Vec<NodeId>> {
        if let Some(s) = self.shortcut(u, v) {
            let mut p = s.path.clone();
            if s.u != u {
                p.reverse();
            }
            return Ok(p);
        }
        if self.base.weight(u, v).is_some() {
            Ok(vec![u, v])
        } else {
            Err(MbfError::MissingTrace(format!(
                "{{{u}, {v}}} is not an edge of G′"
            )))
        }
    }

    /// Expands a walk in `G′` into a walk in `G`.
    pub fn expand_walk(&self, walk: &[NodeId]) -> Result<Vec<NodeId>> {
        let mut out = vec![*walk
            .first()
            .ok_or_else(|| MbfError::MissingTrace("empty walk".into()))?];
        for pair in walk.windows(2) {
            let seg = self.expand_edge(pair[0], pair[1])?;
            out.extend_from_slice(&seg[1..]);
        }
        Ok(out)
    }
}

/// Dijkstra from `hub` that does not expand nodes reached with `limit`
/// hops. Returns `(node, dist, path)` for every reached node other than
/// `hub`.
fn truncated_dijkstra(
    g: &WeightedGraph,
    hub: NodeId,
    limit: usize,
) -> Vec<(NodeId, f64, Vec<NodeId>)> {
    #[derive(PartialEq)]
    struct Item(f64, usize, NodeId);
    impl Eq for Item {}
    impl PartialOrd for Item {
        fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Item {
        fn cmp(&self, o: &Self) -> std::cmp::Ordering {
            self.0
                .total_cmp(&o.0)
                .then(self.1.cmp(&o.1))
                .then(self.2.cmp(&o.2))
        }
    }
    let n = g.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut hops = vec![usize::MAX; n];
    let mut pred = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[hub] = 0.0;
    hops[hub] = 0;
    heap.push(Reverse(Item(0.0, 0, hub)));
    while let Some(Reverse(Item(d, h, v))) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        if h >= limit {
            continue;
        }
        for &(w, wt) in g.neighbors(v) {
            let nd = d + wt;
            if !done[w] && (nd < dist[w] || (nd == dist[w] && h + 1 < hops[w])) {
                dist[w] = nd;
                hops[w] = h + 1;
                pred[w] = v;
                heap.push(Reverse(Item(nd, h + 1, w)));
            }
        }
    }
    (0..n)
        .filter(|&v| done[v] && v != hub)
        .map(|v| {
            let mut path = vec![v];
            let mut cur = v;
            while cur != hub {
                cur = pred[cur];
                path.push(cur);
            }
            path.reverse();
            (v, dist[v], path)
        })
        .collect()
}

/// Builds `G′` from `G` according to `cfg`.
pub fn augment(g: &WeightedGraph, cfg: &HopsetConfig) -> Result<AugmentedGraph> {
    g.require_connected()?;
    if cfg.d == Some(0) {
        return Err(MbfError::InvalidParameter(
            "hop bound d must be at least 1".into(),
        ));
    }
    if !(cfg.eps_hat >= 0.0) {
        return Err(MbfError::InvalidParameter(format!(
            "ε̂ must be non-negative, got {}",
            cfg.eps_hat
        )));
    }
    let n = g.n();
    match cfg.strategy {
        HopsetStrategy::Identity => {
            let mut aug = AugmentedGraph::identity(g);
            if let Some(d) = cfg.d {
                aug.d = d;
                aug.eps_hopset = (d + 1 >= n).then_some(0.0);
            }
            Ok(aug)
        }
        HopsetStrategy::ClusterShortcut => {
            let d = cfg.d.unwrap_or_else(|| default_d(n));
            let hubs_wanted = ((n as f64).sqrt() * log2_ceil(n) as f64).ceil() as usize;
            let hubs_count = hubs_wanted.min(n);
            let mut rng = stream(cfg.seed, "hopset-hubs", 0);
            let mut hubs: Vec<NodeId> = sample(&mut rng, n, hubs_count).into_vec();
            hubs.sort_unstable();
            let limit = (d / 2).max(1);
            let mut candidates: Vec<Shortcut> = hubs
                .par_iter()
                .flat_map_iter(|&hub| {
                    truncated_dijkstra(g, hub, limit)
                        .into_iter()
                        .filter(|(_, _, p)| p.len() > 2)
                        .map(move |(v, dist, path)| Shortcut {
                            u: hub,
                            v,
                            weight: dist,
                            path,
                        })
                })
                .collect();
            // Canonical orientation (u < v) and path order make the
            // selection independent of the parallel schedule.
            for s in &mut candidates {
                if s.u > s.v {
                    std::mem::swap(&mut s.u, &mut s.v);
                    s.path.reverse();
                }
            }
            candidates.sort_by(|a, b| {
                (a.u, a.v)
                    .cmp(&(b.u, b.v))
                    .then(a.weight.total_cmp(&b.weight))
                    .then(a.path.cmp(&b.path))
            });
            candidates.dedup_by_key(|s| (s.u, s.v));
            candidates.retain(|s| g.weight(s.u, s.v).is_none_or(|w| s.weight < w));
            Ok(AugmentedGraph::with_extras(g, candidates, d))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HopsetReport {
    /// `max dist^d(v, w, G′) / dist(v, w, G)` over pairs `v ≠ w`.
    pub max_ratio: f64,
    pub violating_pair: Option<(NodeId, NodeId)>,
    pub passed: bool,
}

/// Measures how well `d`-hop distances in `G′` approximate `G`.
pub fn verify_hopset(aug: &AugmentedGraph, d: usize, eps_hat: f64) -> Result<HopsetReport> {
    let n = aug.n();
    if n > VERIFY_CAP {
        return Err(MbfError::CapExceeded {
            what: "hop-set verification",
            n,
            cap: VERIFY_CAP,
        });
    }
    let per_source: Vec<(f64, NodeId, NodeId)> = (0..n)
        .into_par_iter()
        .map(|s| {
            let exact = oracles::dijkstra_dense(&aug.base, s);
            let hop = oracles::hop_limited_dense(&aug.combined, s, d);
            let mut worst = (1.0, s, s);
            for v in 0..n {
                if v == s || !exact[v].is_finite() {
                    continue;
                }
                let r = hop[v] / exact[v];
                if r > worst.0 {
                    worst = (r, s, v);
                }
            }
            worst
        })
        .collect();
    let (max_ratio, s, v) =
        per_source
            .into_iter()
            .fold((1.0, 0, 0), |acc, x| if x.0 > acc.0 { x } else { acc });
    let passed = max_ratio <= 1.0 + eps_hat;
    Ok(HopsetReport {
        max_ratio,
        violating_pair: (!passed).then_some((s, v)),
        passed,
    })
}

/// The hop set the pipelines use: the configured strategy, verified when
/// the graph is small enough, falling back to the exact identity hop set
/// (`d = n − 1`) if verification fails or is impossible.
pub fn prepare(g: &WeightedGraph, cfg: &HopsetConfig) -> Result<AugmentedGraph> {
    let mut aug = augment(g, cfg)?;
    if cfg.strategy == HopsetStrategy::Identity && aug.eps_hopset.is_some() {
        return Ok(aug);
    }
    if g.n() > VERIFY_CAP {
        log::warn!(
            "hop set cannot be verified for n = {}; using identity",
            g.n()
        );
        return Ok(AugmentedGraph::identity(g));
    }
    let report = verify_hopset(&aug, aug.d, cfg.eps_hat)?;
    if report.passed {
        aug.eps_hopset = Some(report.max_ratio - 1.0);
        Ok(aug)
    } else {
        log::info!(
            "hop set misses ε̂ = {} for d = {} (ratio {}); using identity",
            cfg.eps_hat,
            aug.d,
            report.max_ratio
        );
        Ok(AugmentedGraph::identity(g))
    }
}
