//! Ready-made MBF-like algorithms: shortest paths, source detection, forest
//! fires, widest paths, k shortest distances and connectivity.

use std::sync::Arc;

use super::{EndsAtFilter, KsdpFilter, MbfAlgorithm, SourceDetectionFilter};
use crate::algebra::{
    BoolValue, BoolVector, DistanceMap, IdentityFilter, MaxMin, MinPlus, NodeId, PathSet,
    StateVector, WidestMap,
};
use crate::error::{MbfError, Result};

pub type DistanceAlgorithm = MbfAlgorithm<MinPlus, DistanceMap>;
pub type WidestAlgorithm = MbfAlgorithm<MaxMin, WidestMap>;
pub type PathAlgorithm = MbfAlgorithm<PathSet, PathSet>;
pub type ConnectivityAlgorithm = MbfAlgorithm<BoolValue, BoolVector>;

/// Default bound on the number of stored paths in a kSDP intermediate state.
pub const DEFAULT_PATH_CAP: usize = 1_000_000;

fn check_node(n: usize, v: NodeId) -> Result<()> {
    if v >= n {
        Err(MbfError::InvalidParameter(format!(
            "node {v} is outside [0, {n})"
        )))
    } else {
        Ok(())
    }
}

fn check_nodes(n: usize, set: &[NodeId]) -> Result<()> {
    set.iter().try_for_each(|&v| check_node(n, v))
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(MbfError::InvalidParameter("k must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `x^(0)_{vw} = 0` iff `v = w ∈ S` (all of `V` if `sources` is `None`).
pub fn unit_distance_state(n: usize, sources: Option<&[NodeId]>) -> StateVector<DistanceMap> {
    let mut states = vec![DistanceMap::new(); n];
    match sources {
        Some(s) => {
            for &v in s {
                states[v] = DistanceMap::singleton(v, 0.0);
            }
        }
        None => {
            for (v, st) in states.iter_mut().enumerate() {
                *st = DistanceMap::singleton(v, 0.0);
            }
        }
    }
    StateVector::from_states(states)
}

fn unit_width_state(n: usize, sources: Option<&[NodeId]>) -> StateVector<WidestMap> {
    let is_source = |v: NodeId| sources.is_none_or(|s| s.contains(&v));
    StateVector::from_states(
        (0..n)
            .map(|v| {
                if is_source(v) {
                    WidestMap::from_pairs(vec![(v, f64::INFINITY)])
                } else {
                    WidestMap::default()
                }
            })
            .collect(),
    )
}

/// Source detection: for each node, the `k` closest sources within
/// distance `max_dist`, optionally limited to `hops` iterations.
pub fn source_detection(
    n: usize,
    sources: &[NodeId],
    max_dist: f64,
    k: usize,
    hops: Option<usize>,
) -> Result<DistanceAlgorithm> {
    check_nodes(n, sources)?;
    if max_dist.is_nan() || max_dist < 0.0 {
        return Err(MbfError::InvalidParameter(format!(
            "distance bound must be non-negative, got {max_dist}"
        )));
    }
    let filter = SourceDetectionFilter::new(n, Some(sources), max_dist, k);
    Ok(MbfAlgorithm::new(
        "source-detection",
        Arc::new(filter),
        unit_distance_state(n, Some(sources)),
    )
    .with_hops(hops))
}

/// All-pairs shortest paths (exact distances at the fixpoint).
pub fn apsp(n: usize) -> DistanceAlgorithm {
    MbfAlgorithm::new(
        "apsp",
        Arc::new(IdentityFilter),
        unit_distance_state(n, None),
    )
}

/// `h`-hop distances between all pairs.
pub fn hop_apsp(n: usize, h: usize) -> DistanceAlgorithm {
    apsp(n).with_hops(Some(h))
}

pub fn sssp(n: usize, s: NodeId) -> Result<DistanceAlgorithm> {
    check_node(n, s)?;
    let alg = source_detection(n, &[s], f64::INFINITY, 1, None)?;
    Ok(MbfAlgorithm {
        name: "sssp".into(),
        ..alg
    })
}

/// The `k` closest nodes of every node, ties by node id.
pub fn kssp(n: usize, k: usize) -> Result<DistanceAlgorithm> {
    check_k(k)?;
    Ok(MbfAlgorithm::new(
        "kssp",
        Arc::new(SourceDetectionFilter::all(k)),
        unit_distance_state(n, None),
    ))
}

/// Distances from every node to every source in `sources`.
pub fn mssp(n: usize, sources: &[NodeId]) -> Result<DistanceAlgorithm> {
    let alg = source_detection(n, sources, f64::INFINITY, sources.len().max(1), None)?;
    Ok(MbfAlgorithm {
        name: "mssp".into(),
        ..alg
    })
}

/// Forest fire: each node learns its distance to the nearest burning node
/// if it is at most `max_dist`.
pub fn fire(n: usize, burning: &[NodeId], max_dist: f64) -> Result<DistanceAlgorithm> {
    let alg = source_detection(n, burning, max_dist, 1, None)?;
    Ok(MbfAlgorithm {
        name: "fire".into(),
        ..alg
    })
}

pub fn sswp(n: usize, s: NodeId) -> Result<WidestAlgorithm> {
    check_node(n, s)?;
    Ok(MbfAlgorithm::new(
        "sswp",
        Arc::new(IdentityFilter),
        unit_width_state(n, Some(&[s])),
    ))
}

pub fn apwp(n: usize) -> WidestAlgorithm {
    MbfAlgorithm::new("apwp", Arc::new(IdentityFilter), unit_width_state(n, None))
}

pub fn mswp(n: usize, sources: &[NodeId]) -> Result<WidestAlgorithm> {
    check_nodes(n, sources)?;
    Ok(MbfAlgorithm::new(
        "mswp",
        Arc::new(IdentityFilter),
        unit_width_state(n, Some(sources)),
    ))
}

/// The `k` lightest loop-free `v → s` paths for every `v` (or, with
/// `distinct`, the paths realising the `k` smallest distinct weights),
/// using at most `hops` edges.
///
/// Between iterations only paths that end at `s` are kept; the `k`-selection
/// happens once at the end. Selecting after every step is not sound for
/// loop-free paths: a light path can be pruned in favour of one that later
/// becomes unextendable.
pub fn ksdp(
    n: usize,
    s: NodeId,
    k: usize,
    distinct: bool,
    hops: Option<usize>,
) -> Result<PathAlgorithm> {
    check_node(n, s)?;
    check_k(k)?;
    let init = StateVector::from_states((0..n).map(|v| PathSet::single(vec![v], 0.0)).collect());
    Ok(MbfAlgorithm::new(
        if distinct { "kdsdp" } else { "ksdp" },
        Arc::new(KsdpFilter {
            target: s,
            k,
            distinct,
        }),
        init,
    )
    .with_step_filter(Arc::new(EndsAtFilter { target: s }))
    .with_hops(hops)
    .with_state_cap(DEFAULT_PATH_CAP))
}

/// Node sets reachable within `h` hops.
pub fn connectivity(n: usize, h: usize) -> ConnectivityAlgorithm {
    let init = StateVector::from_states((0..n).map(|v| BoolVector::from_nodes(vec![v])).collect());
    MbfAlgorithm::new("connectivity", Arc::new(IdentityFilter), init).with_hops(Some(h))
}
