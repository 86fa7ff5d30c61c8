use std::collections::HashMap;
use std::fmt::Write as _;

use super::{LeList, RandomOrder};
use crate::algebra::NodeId;
use crate::error::{MbfError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    /// 0 for leaves; the root has the largest level.
    pub level: usize,
    /// `v_i`, the first node of the suffix `(v_i, …, v_k)` this node stands for.
    pub center: NodeId,
    pub parent: Option<usize>,
    /// Weight of the edge to the parent (0 for the root).
    pub weight: f64,
    pub leaf: Option<NodeId>,
    pub children: Vec<usize>,
    /// Smallest graph node whose leaf lies below this node.
    pub witness: NodeId,
}

/// A rooted tree over the suffixes `(v_i, …, v_k)` of the leaf sequences.
///
/// Node ids are deterministic: the root first, then level by level going
/// down, each level in lexicographic order of the sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct FrtTree {
    pub nodes: Vec<TreeNode>,
    leaf_of: Vec<Option<usize>>,
    /// `r_i = β·2^{e_min + i}` for `i = 0..=k`.
    pub radii: Vec<f64>,
    pub beta: f64,
}

/// Smallest `e` with `β·2^e ≥ target` (`i32::MIN` if `target ≤ 0`).
fn exponent_at_least(beta: f64, target: f64) -> i32 {
    if target <= 0.0 {
        return i32::MIN;
    }
    let mut e = (target / beta).log2().ceil() as i32;
    while beta * 2f64.powi(e - 1) >= target {
        e -= 1;
    }
    while beta * 2f64.powi(e) < target {
        e += 1;
    }
    e
}

/// FRT tree with every graph node as a leaf.
pub fn build_frt_tree(
    lists: &[LeList],
    order: &RandomOrder,
    w_min: f64,
    w_max: f64,
) -> Result<FrtTree> {
    let leaves: Vec<NodeId> = (0..lists.len()).collect();
    build_frt_tree_on(lists, &leaves, order, w_min, w_max)
}

/// FRT tree whose leaves are `leaves`; `lists` is indexed by graph node and
/// each leaf's list must contain the leaf itself at distance 0.
pub fn build_frt_tree_on(
    lists: &[LeList],
    leaves: &[NodeId],
    order: &RandomOrder,
    w_min: f64,
    w_max: f64,
) -> Result<FrtTree> {
    if leaves.is_empty() {
        return Err(MbfError::InvalidParameter(
            "tree needs at least one leaf".into(),
        ));
    }
    if !(w_min > 0.0 && w_max >= w_min && w_max.is_finite()) {
        return Err(MbfError::InvalidParameter(format!(
            "weight range [{w_min}, {w_max}] is not valid"
        )));
    }
    for &v in leaves {
        let list = lists.get(v).ok_or(MbfError::UnknownNode(v))?;
        if list.node != v {
            return Err(MbfError::MalformedList {
                node: v,
                reason: format!("list at index {v} belongs to node {}", list.node),
            });
        }
        list.validate(order)?;
    }
    let beta = order.beta;
    let e_min = exponent_at_least(beta, w_min / 2.0);
    let max_last = leaves
        .iter()
        .map(|&v| lists[v].list.last().expect("validated non-empty").0)
        .fold(0.0, f64::max);
    let e_top = exponent_at_least(beta, 2.0 * w_max)
        .max(exponent_at_least(beta, max_last))
        .max(e_min);
    let radii: Vec<f64> = (e_min..=e_top).map(|e| beta * 2f64.powi(e)).collect();
    let k = radii.len() - 1;

    let seqs: Vec<Vec<NodeId>> = leaves
        .iter()
        .map(|&v| {
            radii
                .iter()
                .map(|&r| lists[v].center_within(r).map(|e| e.1).unwrap_or(usize::MAX))
                .collect()
        })
        .collect();
    let root_center = seqs[0][k];
    for (&v, s) in leaves.iter().zip(&seqs) {
        if s[0] != v {
            return Err(MbfError::NotHierarchical(format!(
                "node {v} is not its own level-0 center"
            )));
        }
        if s[k] != root_center {
            return Err(MbfError::NotHierarchical(format!(
                "node {v} ends in {} instead of {root_center}",
                s[k]
            )));
        }
    }

    let mut nodes: Vec<TreeNode> = Vec::new();
    let mut id_at: Vec<Vec<usize>> = vec![vec![0; k + 1]; leaves.len()];
    for level in (0..=k).rev() {
        let mut distinct: Vec<&[NodeId]> = seqs.iter().map(|s| &s[level..]).collect();
        distinct.sort_unstable();
        distinct.dedup();
        let base = nodes.len();
        let ids: HashMap<&[NodeId], usize> = distinct
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, base + i))
            .collect();
        for &s in &distinct {
            nodes.push(TreeNode {
                level,
                center: s[0],
                parent: None,
                weight: 0.0,
                leaf: None,
                children: Vec::new(),
                witness: usize::MAX,
            });
        }
        for (li, s) in seqs.iter().enumerate() {
            let id = ids[&s[level..]];
            id_at[li][level] = id;
            let node = &mut nodes[id];
            node.witness = node.witness.min(leaves[li]);
            if level == 0 {
                node.leaf = Some(leaves[li]);
            }
            if level < k && node.parent.is_none() {
                let parent = id_at[li][level + 1];
                node.parent = Some(parent);
                node.weight = radii[level + 1];
            }
        }
    }
    for id in 0..nodes.len() {
        if let Some(p) = nodes[id].parent {
            nodes[p].children.push(id);
        }
    }
    let n = lists.len();
    let mut leaf_of = vec![None; n];
    for (li, &v) in leaves.iter().enumerate() {
        leaf_of[v] = Some(id_at[li][0]);
    }
    Ok(FrtTree {
        nodes,
        leaf_of,
        radii,
        beta,
    })
}

impl FrtTree {
    pub fn root(&self) -> usize {
        0
    }

    /// `k`: the level of the root.
    pub fn height(&self) -> usize {
        self.radii.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn leaf(&self, v: NodeId) -> Result<usize> {
        self.leaf_of
            .get(v)
            .copied()
            .flatten()
            .ok_or(MbfError::UnknownNode(v))
    }

    /// Graph nodes present as leaves, ascending.
    pub fn leaves(&self) -> Vec<NodeId> {
        (0..self.leaf_of.len())
            .filter(|&v| self.leaf_of[v].is_some())
            .collect()
    }

    /// Tree edges (as child node ids) on the path between two leaves.
    pub fn path_edges(&self, v: NodeId, w: NodeId) -> Result<Vec<usize>> {
        let (mut a, mut b) = (self.leaf(v)?, self.leaf(w)?);
        let mut up = Vec::new();
        let mut down = Vec::new();
        // All leaves sit at level 0, so both sides climb in lockstep.
        while a != b {
            up.push(a);
            down.push(b);
            a = self.nodes[a].parent.expect("distinct nodes below the root");
            b = self.nodes[b].parent.expect("distinct nodes below the root");
        }
        down.reverse();
        up.extend(down);
        Ok(up)
    }

    pub fn tree_distance(&self, v: NodeId, w: NodeId) -> Result<f64> {
        let (mut a, mut b) = (self.leaf(v)?, self.leaf(w)?);
        let (mut da, mut db) = (0.0, 0.0);
        while a != b {
            da += self.nodes[a].weight;
            db += self.nodes[b].weight;
            a = self.nodes[a].parent.expect("distinct nodes below the root");
            b = self.nodes[b].parent.expect("distinct nodes below the root");
        }
        Ok(da + db)
    }

    /// Parent-array TSV: `id parent weight leaf`, `-1` for none.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("id\tparent\tweight\tleaf\n");
        for (id, node) in self.nodes.iter().enumerate() {
            let parent = node.parent.map_or(-1, |p| p as i64);
            let leaf = node.leaf.map_or(-1, |v| v as i64);
            writeln!(out, "{id}\t{parent}\t{}\t{leaf}", node.weight).expect("write to string");
        }
        out
    }
}
