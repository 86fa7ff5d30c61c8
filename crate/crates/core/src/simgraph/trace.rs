//! Predecessor traces of oracle runs over distance maps, enough to turn any
//! entry of the final state back into a walk in `G′`.

use rayon::prelude::*;

use super::SimulatedGraphH;
use crate::algebra::{DistanceMap, NodeId, StateVector};
use crate::engine::instances::DistanceAlgorithm;
use crate::engine::MbfOutcome;
use crate::error::{MbfError, Result};
use crate::graph::AdjacencyOperator;

/// Entries set (new or changed) at one inner step: per node, sorted
/// `(source, predecessor)` pairs.
type StepRecord = Vec<Vec<(NodeId, NodeId)>>;

#[derive(Debug, Default)]
struct LevelRecord {
    steps: Vec<StepRecord>,
}

#[derive(Debug)]
struct IterationRecord {
    /// Per node, sorted `(source, λ)`: the level whose pipeline produced the
    /// entry.
    origin: Vec<Vec<(NodeId, u32)>>,
    levels: Vec<LevelRecord>,
}

#[derive(Debug)]
pub struct OracleTrace {
    iterations: Vec<IterationRecord>,
}

fn lookup<T: Copy>(list: &[(NodeId, T)], key: NodeId) -> Option<T> {
    list.binary_search_by_key(&key, |e| e.0)
        .ok()
        .map(|i| list[i].1)
}

fn record_step(
    prev: &StateVector<DistanceMap>,
    next: &StateVector<DistanceMap>,
    op: AdjacencyOperator<'_>,
    record: &mut LevelRecord,
) {
    let step: StepRecord = (0..next.len())
        .into_par_iter()
        .map(|v| {
            next[v]
                .iter()
                .filter(|&(u, val)| prev[v].get(u) != val)
                .map(|(u, val)| {
                    let pred = op
                        .graph
                        .neighbors(v)
                        .iter()
                        .find(|&&(w, wt)| op.stretch * wt + prev[w].get(u) == val)
                        .map_or(usize::MAX, |e| e.0);
                    (u, pred)
                })
                .collect()
        })
        .collect();
    record.steps.push(step);
}

impl OracleTrace {
    pub fn iterations(&self) -> usize {
        self.iterations.len()
    }

    /// A walk in `G′` from `v` to `u` whose unstretched weight is at most the
    /// value of entry `u` in the final state at `v`.
    pub fn walk(&self, v: NodeId, u: NodeId) -> Result<Vec<NodeId>> {
        let missing = || MbfError::MissingTrace(format!("no trace for entry {u} at node {v}"));
        let mut walk = vec![v];
        let mut cur = v;
        for t in (0..self.iterations.len()).rev() {
            let it = &self.iterations[t];
            let lambda = lookup(&it.origin[cur], u).ok_or_else(missing)?;
            let steps = &it.levels[lambda as usize].steps;
            let mut f = steps.len();
            while f > 0 {
                match (1..=f)
                    .rev()
                    .find_map(|g| lookup(&steps[g - 1][cur], u).map(|p| (g, p)))
                {
                    Some((g, pred)) => {
                        if pred == usize::MAX {
                            return Err(missing());
                        }
                        walk.push(pred);
                        cur = pred;
                        f = g - 1;
                    }
                    None => break,
                }
            }
        }
        if cur != u {
            return Err(missing());
        }
        Ok(walk)
    }
}

impl SimulatedGraphH {
    /// [`Self::oracle_run`] for distance-map algorithms, recording for every
    /// changed entry where it came from.
    pub fn oracle_run_traced(
        &self,
        alg: &DistanceAlgorithm,
    ) -> Result<(MbfOutcome<DistanceMap>, OracleTrace)> {
        let cap = alg.hops.unwrap_or_else(|| self.iteration_cap());
        let filter = alg.intermediate_filter();
        let mut x = alg.initial_state();
        let mut records = Vec::new();
        let mut converged = false;
        while records.len() <= cap {
            let (next, outputs) =
                self.iterate_levels::<DistanceMap, LevelRecord, _>(filter, &x, &record_step);
            if next == x {
                converged = true;
                break;
            }
            if records.len() == cap {
                break;
            }
            let origin = (0..next.len())
                .into_par_iter()
                .map(|v| {
                    next[v]
                        .iter()
                        .map(|(u, val)| {
                            let lambda = outputs
                                .iter()
                                .position(|o| o.state[v].get(u) == val)
                                .expect("merged entry comes from some level");
                            (u, lambda as u32)
                        })
                        .collect()
                })
                .collect();
            records.push(IterationRecord {
                origin,
                levels: outputs.into_iter().map(|o| o.record).collect(),
            });
            x = next;
        }
        if !converged && alg.hops.is_none() {
            return Err(MbfError::NonConvergence {
                iterations: records.len(),
            });
        }
        let iterations = records.len();
        Ok((
            MbfOutcome {
                state: alg.finish(x),
                iterations,
                converged,
            },
            OracleTrace {
                iterations: records,
            },
        ))
    }
}
