use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{Adjacency, NodeId, Semimodule, Semiring};

/// Element of the min-plus semiring `(R≥0 ∪ {∞}, min, +)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct MinPlus(pub f64);

impl MinPlus {
    pub const INF: MinPlus = MinPlus(f64::INFINITY);

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl Semiring for MinPlus {
    fn zero() -> Self {
        MinPlus::INF
    }

    fn one() -> Self {
        MinPlus(0.0)
    }

    fn oplus(&self, other: &Self) -> Self {
        MinPlus(self.0.min(other.0))
    }

    fn odot(&self, other: &Self) -> Self {
        // inf + x is inf for every x >= 0, so plain addition absorbs.
        MinPlus(self.0 + other.0)
    }
}

impl Adjacency for MinPlus {
    fn diagonal(_v: NodeId) -> Self {
        MinPlus(0.0)
    }

    fn edge(_v: NodeId, _w: NodeId, weight: f64, stretch: f64) -> Self {
        MinPlus(stretch * weight)
    }
}

/// Sparse element of the distance-map semimodule `D = (R≥0 ∪ {∞})^V`.
///
/// Entries are kept sorted by node id; absent nodes are at distance ∞.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DistanceMap {
    entries: Vec<(NodeId, f64)>,
}

impl DistanceMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(v: NodeId, dist: f64) -> Self {
        Self::from_pairs(vec![(v, dist)])
    }

    /// Builds a map from arbitrary pairs, keeping the minimum per node and
    /// dropping infinite values.
    pub fn from_pairs(mut pairs: Vec<(NodeId, f64)>) -> Self {
        pairs.retain(|&(_, d)| d.is_finite());
        pairs.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        pairs.dedup_by_key(|p| p.0);
        DistanceMap { entries: pairs }
    }

    pub fn get(&self, v: NodeId) -> f64 {
        match self.entries.binary_search_by_key(&v, |e| e.0) {
            Ok(i) => self.entries[i].1,
            Err(_) => f64::INFINITY,
        }
    }

    /// `|x|`, the number of finite entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(NodeId, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn retain(&self, mut keep: impl FnMut(NodeId, f64) -> bool) -> Self {
        DistanceMap {
            entries: self
                .entries
                .iter()
                .copied()
                .filter(|&(v, d)| keep(v, d))
                .collect(),
        }
    }

    /// Entries in ascending `(distance, node)` order.
    pub fn sorted_by_distance(&self) -> Vec<(NodeId, f64)> {
        let mut out = self.entries.clone();
        out.sort_unstable_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        out
    }
}

impl Semimodule<MinPlus> for DistanceMap {
    fn bottom() -> Self {
        DistanceMap::new()
    }

    fn merge(&self, other: &Self) -> Self {
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1.min(b[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        DistanceMap { entries: out }
    }

    fn scale(&self, s: &MinPlus) -> Self {
        if !s.is_finite() {
            return DistanceMap::new();
        }
        DistanceMap {
            entries: self.entries.iter().map(|&(v, d)| (v, s.0 + d)).collect(),
        }
    }

    fn support_len(&self) -> usize {
        self.len()
    }

    fn aggregate(parts: Vec<Self>) -> Self {
        match parts.len() {
            0 => return DistanceMap::new(),
            1 => return parts.into_iter().next().unwrap(),
            _ => {}
        }
        let pairs: Vec<(NodeId, f64)> = parts.into_iter().flat_map(|p| p.entries).collect();
        DistanceMap::from_pairs(pairs)
    }
}
