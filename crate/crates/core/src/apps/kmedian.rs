use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::algebra::NodeId;
use crate::engine::instances;
use crate::error::{MbfError, Result};
use crate::frt::{build_frt_tree_on, EmbeddingConfig, EmbeddingContext, FrtTree};
use crate::graph::{oracles, WeightedGraph};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KMedianSolution {
    pub facilities: Vec<NodeId>,
    /// `Σ_v dist(v, F, G)`.
    pub objective: f64,
}

/// Facilities chosen on a tree and their objective in the tree metric.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeSolution {
    pub facilities: Vec<NodeId>,
    pub objective: f64,
}

/// Candidate facilities: repeatedly sample `⌈3k·ln n⌉` survivors and drop
/// the half of the survivors closest (in `H`) to the sample.
pub fn kmedian_candidates(ctx: &EmbeddingContext, k: usize, seed: u64) -> Result<Vec<NodeId>> {
    let n = ctx.n();
    if k == 0 || k > n {
        return Err(MbfError::InvalidParameter(format!(
            "k must lie in 1..={n}, got {k}"
        )));
    }
    if k == n {
        return Ok((0..n).collect());
    }
    let per_round = ((3 * k) as f64 * (n as f64).ln()).ceil().max(1.0) as usize;
    let mut alive: Vec<NodeId> = (0..n).collect();
    let mut q = BTreeSet::new();
    let mut round = 0u64;
    loop {
        if per_round >= alive.len() {
            q.extend(alive.iter().copied());
            break;
        }
        let mut r = rng::stream(seed, "kmedian-sample", round);
        let sample: Vec<NodeId> = alive.choose_multiple(&mut r, per_round).copied().collect();
        q.extend(sample.iter().copied());
        let out = ctx
            .h
            .oracle_run(&instances::fire(n, &sample, f64::INFINITY)?)?;
        let dist = |v: NodeId| {
            out.state[v]
                .entries()
                .first()
                .map_or(f64::INFINITY, |e| e.1)
        };
        alive.sort_by(|&a, &b| {
            dist(a)
                .total_cmp(&dist(b))
                .then(ctx.order.rank(a).cmp(&ctx.order.rank(b)))
        });
        let remove = alive.len().div_ceil(2);
        alive.drain(..remove);
        alive.retain(|v| !q.contains(v));
        alive.sort_unstable();
        round += 1;
        if alive.is_empty() {
            break;
        }
    }
    Ok(q.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryNode {
    pub children: Vec<usize>,
    pub weight: f64,
    /// Distance to every leaf below.
    pub height: f64,
    pub leaf: Option<NodeId>,
}

/// A tree with at most two children per node and the same leaf distances as
/// the FRT tree it came from. Node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryTree {
    pub nodes: Vec<BinaryNode>,
}

impl BinaryTree {
    /// Splits wide nodes into chains of zero-weight nodes.
    pub fn from_frt(t: &FrtTree) -> Self {
        let mut nodes: Vec<BinaryNode> = t
            .nodes
            .iter()
            .map(|x| BinaryNode {
                children: Vec::new(),
                weight: x.weight,
                height: 0.0,
                leaf: x.leaf,
            })
            .collect();
        for (id, x) in t.nodes.iter().enumerate() {
            let mut at = id;
            let kids = &x.children;
            for (i, &c) in kids.iter().enumerate() {
                let rest = kids.len() - i;
                if rest > 2 && i + 1 < kids.len() {
                    // c goes left, the remaining children hang off a new node.
                    let extra = nodes.len();
                    nodes.push(BinaryNode {
                        children: Vec::new(),
                        weight: 0.0,
                        height: 0.0,
                        leaf: None,
                    });
                    nodes[at].children.push(c);
                    nodes[at].children.push(extra);
                    at = extra;
                } else {
                    nodes[at].children.push(c);
                }
            }
        }
        let mut tree = BinaryTree { nodes };
        for u in tree.post_order() {
            let h = tree.nodes[u]
                .children
                .first()
                .map_or(0.0, |&c| tree.nodes[c].height + tree.nodes[c].weight);
            tree.nodes[u].height = h;
        }
        tree
    }

    fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(0usize, false)];
        while let Some((u, done)) = stack.pop() {
            if done {
                out.push(u);
            } else {
                stack.push((u, true));
                for &c in self.nodes[u].children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }
}

/// Optimal k-median on the leaves of `t`: clients are leaves weighted by
/// `weights[graph node]`, facilities may only open at `allowed` leaves.
pub fn kmedian_tree_dp(
    t: &BinaryTree,
    weights: &[f64],
    allowed: &[NodeId],
    k: usize,
) -> Result<TreeSolution> {
    if k == 0 {
        return Err(MbfError::InvalidParameter("k must be at least 1".into()));
    }
    let allowed: BTreeSet<NodeId> = allowed.iter().copied().collect();
    let len = t.nodes.len();
    // f[u][j]: cost inside subtree u with exactly j >= 1 open facilities.
    let mut f: Vec<Vec<f64>> = vec![Vec::new(); len];
    let mut split: Vec<Vec<usize>> = vec![Vec::new(); len];
    let mut load = vec![0.0; len];
    let mut cap = vec![0usize; len];
    for u in t.post_order() {
        let node = &t.nodes[u];
        if let Some(v) = node.leaf {
            load[u] = weights.get(v).copied().unwrap_or(0.0);
            if allowed.contains(&v) {
                cap[u] = 1;
                f[u] = vec![f64::INFINITY, 0.0];
            } else {
                f[u] = vec![f64::INFINITY];
            }
            continue;
        }
        match node.children[..] {
            [c] => {
                load[u] = load[c];
                cap[u] = cap[c];
                f[u] = f[c].clone();
                split[u] = (0..f[u].len()).collect();
            }
            [a, b] => {
                load[u] = load[a] + load[b];
                cap[u] = (cap[a] + cap[b]).min(k);
                let far = 2.0 * node.height;
                let cost = |c: usize, j: usize, f: &[Vec<f64>]| {
                    if j == 0 {
                        load[c] * far
                    } else {
                        f[c][j]
                    }
                };
                let mut fu = vec![f64::INFINITY; cap[u] + 1];
                let mut su = vec![0; cap[u] + 1];
                for j in 1..=cap[u] {
                    for ja in j.saturating_sub(cap[b])..=j.min(cap[a]) {
                        let c = cost(a, ja, &f) + cost(b, j - ja, &f);
                        if c < fu[j] {
                            fu[j] = c;
                            su[j] = ja;
                        }
                    }
                }
                f[u] = fu;
                split[u] = su;
            }
            _ => unreachable!("binary tree nodes have one or two children"),
        }
    }
    let root = 0;
    let (best_j, objective) = (1..f[root].len())
        .map(|j| (j, f[root][j]))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .ok_or_else(|| MbfError::InvalidParameter("no allowed facility among the leaves".into()))?;
    let mut facilities = Vec::new();
    let mut todo = vec![(root, best_j)];
    while let Some((u, j)) = todo.pop() {
        if j == 0 {
            continue;
        }
        let node = &t.nodes[u];
        if let Some(v) = node.leaf {
            facilities.push(v);
            continue;
        }
        match node.children[..] {
            [c] => todo.push((c, j)),
            [a, b] => {
                let ja = split[u][j];
                todo.push((a, ja));
                todo.push((b, j - ja));
            }
            _ => unreachable!("binary tree nodes have one or two children"),
        }
    }
    facilities.sort_unstable();
    Ok(TreeSolution {
        facilities,
        objective,
    })
}

fn objective_in(g: &WeightedGraph, facilities: &[NodeId]) -> f64 {
    let mut best = vec![f64::INFINITY; g.n()];
    for &f in facilities {
        for (b, d) in best.iter_mut().zip(oracles::dijkstra_dense(g, f)) {
            *b = b.min(d);
        }
    }
    best.iter().sum()
}

/// Candidates, an FRT tree on the candidates, then the tree DP; the
/// objective is reported in the metric of `g`.
pub fn kmedian(g: &WeightedGraph, k: usize, cfg: &EmbeddingConfig) -> Result<KMedianSolution> {
    let n = g.n();
    if k == 0 {
        return Err(MbfError::InvalidParameter("k must be at least 1".into()));
    }
    g.require_connected()?;
    if k >= n {
        return Ok(KMedianSolution {
            facilities: (0..n).collect(),
            objective: 0.0,
        });
    }
    let ctx = EmbeddingContext::new(g, cfg)?;
    let q = kmedian_candidates(&ctx, k, rng::derive_seed(cfg.seed, "kmedian", 0))?;
    let facilities = if q.len() <= k {
        q
    } else {
        let assign =
            ctx.h
                .oracle_run(&instances::source_detection(n, &q, f64::INFINITY, 1, None)?)?;
        let mut weights = vec![0.0; n];
        for x in assign.state.iter() {
            let (nearest, _) = *x.entries().first().ok_or(MbfError::Disconnected)?;
            weights[nearest] += 1.0;
        }
        let lists = ctx.le_lists(Some(&q))?;
        let tree = build_frt_tree_on(&lists, &q, &ctx.order, ctx.w_min, ctx.w_max)?;
        kmedian_tree_dp(&BinaryTree::from_frt(&tree), &weights, &q, k)?.facilities
    };
    let objective = objective_in(g, &facilities);
    Ok(KMedianSolution {
        facilities,
        objective,
    })
}
