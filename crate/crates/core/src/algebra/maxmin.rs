use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{Adjacency, NodeId, Semimodule, Semiring};

/// Element of the max-min semiring `(R≥0 ∪ {∞}, max, min)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct MaxMin(pub f64);

impl Semiring for MaxMin {
    fn zero() -> Self {
        MaxMin(0.0)
    }

    fn one() -> Self {
        MaxMin(f64::INFINITY)
    }

    fn oplus(&self, other: &Self) -> Self {
        MaxMin(self.0.max(other.0))
    }

    fn odot(&self, other: &Self) -> Self {
        MaxMin(self.0.min(other.0))
    }
}

impl Adjacency for MaxMin {
    fn diagonal(_v: NodeId) -> Self {
        MaxMin(f64::INFINITY)
    }

    fn edge(_v: NodeId, _w: NodeId, weight: f64, _stretch: f64) -> Self {
        MaxMin(weight)
    }
}

/// Sparse element of `W = (R≥0 ∪ {∞})^V` over the max-min semiring;
/// absent nodes have width 0.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WidestMap {
    entries: Vec<(NodeId, f64)>,
}

impl WidestMap {
    pub fn from_pairs(mut pairs: Vec<(NodeId, f64)>) -> Self {
        pairs.retain(|&(_, w)| w > 0.0);
        pairs.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(b.1.total_cmp(&a.1)));
        pairs.dedup_by_key(|p| p.0);
        WidestMap { entries: pairs }
    }

    pub fn get(&self, v: NodeId) -> f64 {
        match self.entries.binary_search_by_key(&v, |e| e.0) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0.0,
        }
    }

    pub fn entries(&self) -> &[(NodeId, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Semimodule<MaxMin> for WidestMap {
    fn bottom() -> Self {
        WidestMap::default()
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
                    out.push((a[i].0, a[i].1.max(b[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        WidestMap { entries: out }
    }

    fn scale(&self, s: &MaxMin) -> Self {
        if s.0 <= 0.0 {
            return WidestMap::default();
        }
        WidestMap {
            entries: self.entries.iter().map(|&(v, w)| (v, w.min(s.0))).collect(),
        }
    }

    fn support_len(&self) -> usize {
        self.len()
    }

    fn aggregate(parts: Vec<Self>) -> Self {
        WidestMap::from_pairs(parts.into_iter().flat_map(|p| p.entries).collect())
    }
}
