use serde::{Deserialize, Serialize};

use super::{Adjacency, NodeId, Semimodule, Semiring};

/// The Boolean semiring `({0,1}, ∨, ∧)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoolValue(pub bool);

impl Semiring for BoolValue {
    fn zero() -> Self {
        BoolValue(false)
    }

    fn one() -> Self {
        BoolValue(true)
    }

    fn oplus(&self, other: &Self) -> Self {
        BoolValue(self.0 || other.0)
    }

    fn odot(&self, other: &Self) -> Self {
        BoolValue(self.0 && other.0)
    }
}

impl Adjacency for BoolValue {
    fn diagonal(_v: NodeId) -> Self {
        BoolValue(true)
    }

    fn edge(_v: NodeId, _w: NodeId, _weight: f64, _stretch: f64) -> Self {
        BoolValue(true)
    }
}

/// Sparse element of `B^V`: the sorted set of coordinates equal to 1.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BoolVector {
    ones: Vec<NodeId>,
}

impl BoolVector {
    pub fn from_nodes(mut nodes: Vec<NodeId>) -> Self {
        nodes.sort_unstable();
        nodes.dedup();
        BoolVector { ones: nodes }
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.ones.binary_search(&v).is_ok()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.ones
    }

    pub fn len(&self) -> usize {
        self.ones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ones.is_empty()
    }
}

impl Semimodule<BoolValue> for BoolVector {
    fn bottom() -> Self {
        BoolVector::default()
    }

    fn merge(&self, other: &Self) -> Self {
        let mut ones = Vec::with_capacity(self.ones.len() + other.ones.len());
        let (a, b) = (&self.ones, &other.ones);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i] < b[j] {
                ones.push(a[i]);
                i += 1;
            } else if a[i] > b[j] {
                ones.push(b[j]);
                j += 1;
            } else {
                ones.push(a[i]);
                i += 1;
                j += 1;
            }
        }
        ones.extend_from_slice(&a[i..]);
        ones.extend_from_slice(&b[j..]);
        BoolVector { ones }
    }

    fn scale(&self, s: &BoolValue) -> Self {
        if s.0 {
            self.clone()
        } else {
            BoolVector::default()
        }
    }

    fn support_len(&self) -> usize {
        self.len()
    }

    fn aggregate(parts: Vec<Self>) -> Self {
        BoolVector::from_nodes(parts.into_iter().flat_map(|p| p.ones).collect())
    }
}
