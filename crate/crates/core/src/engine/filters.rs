use crate::algebra::{DistanceMap, Filter, NodeId, Path, PathSet};

/// Keeps entries whose node is a source, whose value is at most
/// `max_dist`, and that are among the `k` smallest `(value, id)` pairs.
#[derive(Debug, Clone)]
pub struct SourceDetectionFilter {
    /// `None` means every node is a source.
    sources: Option<Vec<bool>>,
    pub max_dist: f64,
    pub k: usize,
}

impl SourceDetectionFilter {
    pub fn new(n: usize, sources: Option<&[NodeId]>, max_dist: f64, k: usize) -> Self {
        let sources = sources.map(|s| {
            let mut mask = vec![false; n];
            for &v in s {
                mask[v] = true;
            }
            mask
        });
        SourceDetectionFilter {
            sources,
            max_dist,
            k,
        }
    }

    pub fn all(k: usize) -> Self {
        SourceDetectionFilter {
            sources: None,
            max_dist: f64::INFINITY,
            k,
        }
    }

    fn is_source(&self, v: NodeId) -> bool {
        self.sources
            .as_ref()
            .is_none_or(|m| m.get(v).copied().unwrap_or(false))
    }
}

impl Filter<DistanceMap> for SourceDetectionFilter {
    fn project(&self, x: &DistanceMap) -> DistanceMap {
        if self.k == 0 {
            return DistanceMap::new();
        }
        let admissible = |v: NodeId, d: f64| d <= self.max_dist && self.is_source(v);
        if x.len() <= self.k {
            return x.retain(admissible);
        }
        let mut kept: Vec<(NodeId, f64)> = x.iter().filter(|&(v, d)| admissible(v, d)).collect();
        if kept.len() > self.k {
            kept.sort_unstable_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            kept.truncate(self.k);
        }
        DistanceMap::from_pairs(kept)
    }
}

/// Drops every path that does not end at `target`.
#[derive(Debug, Clone, Copy)]
pub struct EndsAtFilter {
    pub target: NodeId,
}

impl Filter<PathSet> for EndsAtFilter {
    fn project(&self, x: &PathSet) -> PathSet {
        let mut out = x.retain(|p, _| p.last() == Some(&self.target));
        // `one` implicitly holds the single-node path at the target.
        if x.has_all_singletons() {
            out.insert(vec![self.target], 0.0);
        }
        out
    }
}

/// For each start node `v`, the `k` lightest `v → s` paths, ties broken by
/// lexicographic path order. In `distinct` mode only the first path of each
/// weight counts, so the result holds the `k` smallest distinct weights.
#[derive(Debug, Clone, Copy)]
pub struct KsdpFilter {
    pub target: NodeId,
    pub k: usize,
    pub distinct: bool,
}

impl Filter<PathSet> for KsdpFilter {
    fn project(&self, x: &PathSet) -> PathSet {
        let mut by_start: Vec<(NodeId, f64, &Path)> = x
            .iter()
            .filter(|(p, _)| p.last() == Some(&self.target))
            .map(|(p, w)| (p[0], w, p))
            .collect();
        by_start.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(b.2)));
        let mut out = PathSet::new();
        let mut i = 0;
        while i < by_start.len() {
            let start = by_start[i].0;
            let mut taken = 0;
            let mut last_weight = None;
            while i < by_start.len() && by_start[i].0 == start {
                let (_, w, p) = by_start[i];
                i += 1;
                if taken == self.k {
                    continue;
                }
                if self.distinct && last_weight == Some(w) {
                    continue;
                }
                out.insert(p.clone(), w);
                last_weight = Some(w);
                taken += 1;
            }
        }
        out
    }
}
