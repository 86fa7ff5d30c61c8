use std::collections::BTreeMap;

use super::{Adjacency, NodeId, Semiring};

/// A non-empty, loop-free node sequence. `Vec` ordering is the canonical
/// (lexicographic) path order used for tie-breaking.
pub type Path = Vec<NodeId>;

/// Element of the all-paths semiring `P_min,+`: a finite map from loop-free
/// paths to weights. Absent paths have weight ∞.
///
/// The semiring `one` contains every single-node path with weight 0, which
/// is not a finite set; it is carried by the `all_singletons` flag instead of
/// explicit entries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathSet {
    paths: BTreeMap<Path, f64>,
    all_singletons: bool,
}

fn is_loop_free(path: &[NodeId]) -> bool {
    if path.len() <= 8 {
        return path
            .iter()
            .enumerate()
            .all(|(i, v)| !path[i + 1..].contains(v));
    }
    let mut seen: Vec<NodeId> = path.to_vec();
    seen.sort_unstable();
    seen.windows(2).all(|w| w[0] != w[1])
}

impl PathSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(path: Path, weight: f64) -> Self {
        let mut s = PathSet::new();
        s.insert(path, weight);
        s
    }

    /// Inserts `path` keeping the smaller weight. Paths with repeated nodes,
    /// empty paths and infinite weights are ignored.
    pub fn insert(&mut self, path: Path, weight: f64) {
        if path.is_empty() || !weight.is_finite() || !is_loop_free(&path) {
            return;
        }
        if self.all_singletons && path.len() == 1 {
            return;
        }
        self.paths
            .entry(path)
            .and_modify(|w| *w = w.min(weight))
            .or_insert(weight);
    }

    pub fn from_paths(items: impl IntoIterator<Item = (Path, f64)>) -> Self {
        let mut s = PathSet::new();
        for (p, w) in items {
            s.insert(p, w);
        }
        s
    }

    pub fn get(&self, path: &[NodeId]) -> f64 {
        if self.all_singletons && path.len() == 1 {
            return 0.0;
        }
        self.paths.get(path).copied().unwrap_or(f64::INFINITY)
    }

    /// Explicitly stored paths (the implicit singletons of `one` excluded).
    pub fn iter(&self) -> impl Iterator<Item = (&Path, f64)> + '_ {
        self.paths.iter().map(|(p, &w)| (p, w))
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty() && !self.all_singletons
    }

    pub fn has_all_singletons(&self) -> bool {
        self.all_singletons
    }

    /// Paths starting at `v`, in canonical order.
    fn starting_at(&self, v: NodeId) -> impl Iterator<Item = (&Path, f64)> + '_ {
        self.paths.range(vec![v]..vec![v + 1]).map(|(p, &w)| (p, w))
    }

    pub fn retain(&self, mut keep: impl FnMut(&Path, f64) -> bool) -> Self {
        PathSet {
            paths: self
                .paths
                .iter()
                .filter(|(p, &w)| keep(p, w))
                .map(|(p, &w)| (p.clone(), w))
                .collect(),
            all_singletons: false,
        }
    }
}

impl Semiring for PathSet {
    fn zero() -> Self {
        PathSet::new()
    }

    fn one() -> Self {
        PathSet {
            paths: BTreeMap::new(),
            all_singletons: true,
        }
    }

    fn oplus(&self, other: &Self) -> Self {
        let mut out = PathSet {
            paths: BTreeMap::new(),
            all_singletons: self.all_singletons || other.all_singletons,
        };
        for (p, w) in self.iter().chain(other.iter()) {
            out.insert(p.clone(), w);
        }
        out
    }

    /// `(x ⊙ y)_π = min { x_π¹ + y_π² | π = π¹ ∘ π² }`.
    fn odot(&self, other: &Self) -> Self {
        let mut out = PathSet {
            paths: BTreeMap::new(),
            all_singletons: self.all_singletons && other.all_singletons,
        };
        for (p1, w1) in self.iter() {
            let last = *p1.last().expect("paths are non-empty");
            for (p2, w2) in other.starting_at(last) {
                let mut joined = Vec::with_capacity(p1.len() + p2.len() - 1);
                joined.extend_from_slice(p1);
                joined.extend_from_slice(&p2[1..]);
                out.insert(joined, w1 + w2);
            }
            if other.all_singletons {
                out.insert(p1.clone(), w1);
            }
        }
        if self.all_singletons {
            for (p2, w2) in other.iter() {
                out.insert(p2.clone(), w2);
            }
        }
        out
    }

    fn support_len(&self) -> usize {
        self.paths.len()
    }
}

impl Adjacency for PathSet {
    fn diagonal(_v: NodeId) -> Self {
        PathSet::one()
    }

    fn edge(v: NodeId, w: NodeId, weight: f64, stretch: f64) -> Self {
        PathSet::single(vec![v, w], stretch * weight)
    }
}
