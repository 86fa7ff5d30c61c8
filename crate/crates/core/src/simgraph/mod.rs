//! The simulated graph `H` over `G′` and the oracle that runs MBF-like
//! algorithms on `H` using only iterations on `G′`.
//!
//! `H` is complete, with `w({v, w}) = (1+ε̂)^{Λ−level(v,w)}·dist^d(v, w, G′)`.
//! Its adjacency matrix decomposes as `A_H = ⊕_λ P_λ A_λ^d P_λ`, where `A_λ`
//! is the adjacency of `G′` stretched by `(1+ε̂)^{Λ−λ}` and `P_λ` keeps the
//! coordinates of nodes of level at least `λ`. One oracle iteration is
//! therefore `x ↦ r^V ⊕_λ P_λ (r^V A_λ)^d P_λ x`.

use rand::Rng;
use rayon::prelude::*;

use crate::algebra::{Filter, MinPlus, NodeId, Semimodule, StateVector};
use crate::engine::{slf_apply, MbfAlgorithm, MbfOutcome};
use crate::error::{MbfError, Result};
use crate::graph::{oracles, AdjacencyOperator, WeightedGraph};
use crate::hopset::{log2n, AugmentedGraph};
use crate::rng::stream;

mod trace;

pub use trace::OracleTrace;

/// Largest `n` for which `materialize_h` builds `H` explicitly.
pub const MATERIALIZE_CAP: usize = 256;

/// Default constant `c` of the oracle iteration cap `c·⌈log₂ n⌉²`.
pub const DEFAULT_CAP_CONST: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelAssignment {
    levels: Vec<u32>,
    lambda: u32,
    pub seed: u64,
}

impl LevelAssignment {
    pub fn from_levels(levels: Vec<u32>, seed: u64) -> Self {
        let lambda = levels.iter().copied().max().unwrap_or(0);
        LevelAssignment {
            levels,
            lambda,
            seed,
        }
    }

    pub fn level(&self, v: NodeId) -> u32 {
        self.levels[v]
    }

    pub fn edge_level(&self, v: NodeId, w: NodeId) -> u32 {
        self.levels[v].min(self.levels[w])
    }

    /// `Λ`, the maximum level.
    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// I.i.d. geometric levels: each node climbs one level per fair coin that
/// comes up heads.
pub fn sample_levels(n: usize, seed: u64) -> LevelAssignment {
    let mut rng = stream(seed, "levels", 0);
    let levels = (0..n)
        .map(|_| {
            let mut l = 0;
            while rng.gen::<bool>() {
                l += 1;
            }
            l
        })
        .collect();
    LevelAssignment::from_levels(levels, seed)
}

/// `P_λ`: keeps the coordinates of nodes with level at least `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelProjection {
    pub lambda: u32,
}

impl LevelProjection {
    pub fn apply<M: Clone>(
        &self,
        levels: &LevelAssignment,
        x: &StateVector<M>,
        bottom: M,
    ) -> StateVector<M> {
        StateVector::from_states(
            x.iter()
                .enumerate()
                .map(|(v, s)| {
                    if levels.level(v) >= self.lambda {
                        s.clone()
                    } else {
                        bottom.clone()
                    }
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone)]
pub struct SimulatedGraphH {
    pub aug: AugmentedGraph,
    pub levels: LevelAssignment,
    pub d: usize,
    pub eps_hat: f64,
    pub cap_const: usize,
}

/// One per-level pipeline result: `P_λ (r^V A_λ)^d P_λ x` and the hook's
/// recording.
pub(crate) struct LevelOutput<M, T> {
    pub state: StateVector<M>,
    pub record: T,
}

impl SimulatedGraphH {
    pub fn new(aug: AugmentedGraph, levels: LevelAssignment, eps_hat: f64) -> Self {
        assert_eq!(aug.n(), levels.len(), "levels do not match the graph");
        let d = aug.d;
        SimulatedGraphH {
            aug,
            levels,
            d,
            eps_hat,
            cap_const: DEFAULT_CAP_CONST,
        }
    }

    pub fn with_cap_const(mut self, c: usize) -> Self {
        self.cap_const = c;
        self
    }

    pub fn n(&self) -> usize {
        self.aug.n()
    }

    pub fn lambda(&self) -> u32 {
        self.levels.lambda()
    }

    /// `(1+ε̂)^{Λ−λ}`.
    pub fn stretch(&self, lambda: u32) -> f64 {
        (1.0 + self.eps_hat).powi((self.levels.lambda() - lambda) as i32)
    }

    /// `max(1, c·⌈log₂ n⌉²)`.
    pub fn iteration_cap(&self) -> usize {
        let l = log2n(self.n());
        (self.cap_const * l * l).max(1)
    }

    pub fn level_operator(&self, lambda: u32) -> AdjacencyOperator<'_> {
        AdjacencyOperator::stretched(&self.aug.combined, self.stretch(lambda))
    }

    /// `w_Λ({v, w})`, using an exact `d`-hop distance computation.
    pub fn h_edge_weight(&self, v: NodeId, w: NodeId) -> MinPlus {
        let dd = oracles::hop_limited_dense(&self.aug.combined, v, self.d)[w];
        MinPlus(self.stretch(self.levels.edge_level(v, w)) * dd)
    }

    /// `H` as an explicit complete graph. Only for tests and small inputs.
    pub fn materialize_h(&self) -> Result<WeightedGraph> {
        let n = self.n();
        if n > MATERIALIZE_CAP {
            return Err(MbfError::CapExceeded {
                what: "materialising H",
                n,
                cap: MATERIALIZE_CAP,
            });
        }
        let rows: Vec<Vec<(NodeId, NodeId, f64)>> = (0..n)
            .into_par_iter()
            .map(|v| {
                let dd = oracles::hop_limited_dense(&self.aug.combined, v, self.d);
                (v + 1..n)
                    .filter(|&w| dd[w].is_finite())
                    .map(|w| (v, w, self.stretch(self.levels.edge_level(v, w)) * dd[w]))
                    .collect()
            })
            .collect();
        let edges: Vec<_> = rows.into_iter().flatten().collect();
        WeightedGraph::from_edges(n, &edges)
    }

    /// `P_λ (r^V A_λ)^d P_λ x`, stopping early at the level's fixpoint.
    /// `hook(prev, next, op, record)` observes every inner step.
    fn level_run<M, T, H>(
        &self,
        lambda: u32,
        filter: &dyn Filter<M>,
        x: &StateVector<M>,
        hook: &H,
    ) -> LevelOutput<M, T>
    where
        M: Semimodule<MinPlus>,
        T: Default,
        H: Fn(&StateVector<M>, &StateVector<M>, AdjacencyOperator<'_>, &mut T),
    {
        let proj = LevelProjection { lambda };
        let op = self.level_operator(lambda);
        let mut record = T::default();
        let mut y = proj.apply(&self.levels, x, M::bottom());
        for _ in 0..self.d {
            let next = slf_apply::<MinPlus, M>(op, &y).filtered(filter);
            if next == y {
                break;
            }
            hook(&y, &next, op, &mut record);
            y = next;
        }
        LevelOutput {
            state: proj.apply(&self.levels, &y, M::bottom()),
            record,
        }
    }

    pub(crate) fn iterate_levels<M, T, H>(
        &self,
        filter: &dyn Filter<M>,
        x: &StateVector<M>,
        hook: &H,
    ) -> (StateVector<M>, Vec<LevelOutput<M, T>>)
    where
        M: Semimodule<MinPlus>,
        T: Default + Send + Sync,
        H: Fn(&StateVector<M>, &StateVector<M>, AdjacencyOperator<'_>, &mut T) + Sync,
    {
        let outputs: Vec<LevelOutput<M, T>> = (0..=self.lambda())
            .into_par_iter()
            .map(|lambda| self.level_run(lambda, filter, x, hook))
            .collect();
        let merged = (0..self.n())
            .into_par_iter()
            .map(|v| {
                let parts: Vec<M> = outputs
                    .iter()
                    .map(|o| &o.state[v])
                    .filter(|s| !s.is_bottom())
                    .cloned()
                    .collect();
                filter.project(&M::aggregate(parts))
            })
            .collect();
        (StateVector::from_states(merged), outputs)
    }

    /// One oracle iteration `r^V ⊕_λ P_λ (r^V A_λ)^d P_λ x` with the
    /// algorithm's intermediate filter. `x` should already be filtered.
    pub fn oracle_iterate<M>(
        &self,
        alg: &MbfAlgorithm<MinPlus, M>,
        x: &StateVector<M>,
    ) -> StateVector<M>
    where
        M: Semimodule<MinPlus> + 'static,
    {
        let noop =
            |_: &StateVector<M>, _: &StateVector<M>, _: AdjacencyOperator<'_>, _: &mut ()| {};
        self.iterate_levels(alg.intermediate_filter(), x, &noop).0
    }

    /// Iterates the oracle to a fixpoint, for at most `alg.hops` iterations
    /// if set and otherwise up to [`Self::iteration_cap`]. Returns the
    /// partial state with `converged == false` when the cap is hit.
    pub fn oracle_run_partial<M>(&self, alg: &MbfAlgorithm<MinPlus, M>) -> Result<MbfOutcome<M>>
    where
        M: Semimodule<MinPlus> + 'static,
    {
        let cap = alg.hops.unwrap_or_else(|| self.iteration_cap());
        let mut x = alg.initial_state();
        alg.check_size(&x)?;
        let mut iterations = 0;
        let mut converged = false;
        while iterations < cap {
            let next = self.oracle_iterate(alg, &x);
            alg.check_size(&next)?;
            if next == x {
                converged = true;
                break;
            }
            x = next;
            iterations += 1;
        }
        if !converged && alg.hops.is_none() {
            // The cap counts changing iterations; check whether the last
            // one already reached the fixpoint.
            converged = self.oracle_iterate(alg, &x) == x;
        }
        Ok(MbfOutcome {
            state: alg.finish(x),
            iterations,
            converged,
        })
    }

    /// Like [`Self::oracle_run_partial`], but a missed fixpoint within the
    /// iteration cap is an error.
    pub fn oracle_run<M>(&self, alg: &MbfAlgorithm<MinPlus, M>) -> Result<MbfOutcome<M>>
    where
        M: Semimodule<MinPlus> + 'static,
    {
        let out = self.oracle_run_partial(alg)?;
        if !out.converged && alg.hops.is_none() {
            return Err(MbfError::NonConvergence {
                iterations: out.iterations,
            });
        }
        Ok(out)
    }
}
