//! Generic MBF-like execution: `x ↦ r^V(A x)` iterated to a fixpoint or a
//! hop cap.

use std::marker::PhantomData;
use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::{
    Adjacency, DistanceMap, Filter, IdentityFilter, MinPlus, Semimodule, StateVector,
};
use crate::error::{MbfError, Result};
use crate::graph::AdjacencyOperator;

mod filters;
pub mod instances;

pub use filters::{EndsAtFilter, KsdpFilter, SourceDetectionFilter};

/// `⊕` of all parts by sort-then-dedup-min.
pub fn aggregate(parts: Vec<DistanceMap>) -> DistanceMap {
    <DistanceMap as Semimodule<MinPlus>>::aggregate(parts)
}

/// `(A x)_v = ⊕_w a_vw ⊙ x_w`, computed for all `v` in parallel.
pub fn slf_apply<S, M>(a: AdjacencyOperator<'_>, x: &StateVector<M>) -> StateVector<M>
where
    S: Adjacency,
    M: Semimodule<S>,
{
    let g = a.graph;
    assert_eq!(g.n(), x.len(), "state vector does not match the graph");
    let states = (0..g.n())
        .into_par_iter()
        .map(|v| {
            let mut parts = Vec::with_capacity(g.neighbors(v).len() + 1);
            if !x[v].is_bottom() {
                parts.push(x[v].scale(&S::diagonal(v)));
            }
            for &(w, weight) in g.neighbors(v) {
                if !x[w].is_bottom() {
                    parts.push(x[w].scale(&S::edge(v, w, weight, a.stretch)));
                }
            }
            M::aggregate(parts)
        })
        .collect();
    StateVector::from_states(states)
}

/// A fully configured MBF-like algorithm: semimodule (via the type
/// parameters), filter, initial state and hop cap.
///
/// `step_filter`, if set, replaces `filter` between iterations; `filter` is
/// then applied once to the final state. It must be a congruence coarser
/// than or equal to `filter`'s so the result is `r^V A^h x^(0)`.
pub struct MbfAlgorithm<S, M> {
    pub name: String,
    pub filter: Arc<dyn Filter<M>>,
    pub step_filter: Option<Arc<dyn Filter<M>>>,
    pub init: StateVector<M>,
    /// `None` runs to a fixpoint.
    pub hops: Option<usize>,
    /// Refuse intermediate states with more entries than this in total.
    pub state_cap: Option<usize>,
    _semiring: PhantomData<fn() -> S>,
}

impl<S, M> Clone for MbfAlgorithm<S, M>
where
    M: Clone,
{
    fn clone(&self) -> Self {
        MbfAlgorithm {
            name: self.name.clone(),
            filter: Arc::clone(&self.filter),
            step_filter: self.step_filter.clone(),
            init: self.init.clone(),
            hops: self.hops,
            state_cap: self.state_cap,
            _semiring: PhantomData,
        }
    }
}

impl<S, M> std::fmt::Debug for MbfAlgorithm<S, M> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MbfAlgorithm")
            .field("name", &self.name)
            .field("n", &self.init.len())
            .field("hops", &self.hops)
            .finish()
    }
}

impl<S, M> MbfAlgorithm<S, M>
where
    S: Adjacency,
    M: Semimodule<S> + 'static,
{
    pub fn new(name: impl Into<String>, filter: Arc<dyn Filter<M>>, init: StateVector<M>) -> Self {
        MbfAlgorithm {
            name: name.into(),
            filter,
            step_filter: None,
            init,
            hops: None,
            state_cap: None,
            _semiring: PhantomData,
        }
    }

    pub fn with_hops(mut self, hops: Option<usize>) -> Self {
        self.hops = hops;
        self
    }

    pub fn with_step_filter(mut self, filter: Arc<dyn Filter<M>>) -> Self {
        self.step_filter = Some(filter);
        self
    }

    pub fn with_state_cap(mut self, cap: usize) -> Self {
        self.state_cap = Some(cap);
        self
    }

    pub fn n(&self) -> usize {
        self.init.len()
    }

    /// The filter applied between iterations.
    pub fn intermediate_filter(&self) -> &dyn Filter<M> {
        self.step_filter.as_deref().unwrap_or(&*self.filter)
    }

    /// `r^V x^(0)` under the intermediate filter.
    pub fn initial_state(&self) -> StateVector<M> {
        self.init.filtered(self.intermediate_filter())
    }

    /// Applies the final filter. Without a separate step filter this is a
    /// re-application and changes nothing, by idempotence.
    pub fn finish(&self, x: StateVector<M>) -> StateVector<M> {
        x.filtered(&*self.filter)
    }

    pub fn check_size(&self, x: &StateVector<M>) -> Result<()> {
        if let Some(cap) = self.state_cap {
            let total: usize = x.states().par_iter().map(|m| m.support_len()).sum();
            if total > cap {
                return Err(MbfError::CapExceeded {
                    what: "intermediate state entries",
                    n: total,
                    cap,
                });
            }
        }
        Ok(())
    }
}

pub struct MbfOutcome<M> {
    pub state: StateVector<M>,
    /// Number of iterations that changed the state.
    pub iterations: usize,
    /// Whether a fixpoint was observed (always true if the hop cap was not
    /// hit before the state stabilised).
    pub converged: bool,
}

/// `x^(i+1) = r^V A x^(i)` with the intermediate filter.
pub fn mbf_step<S, M>(
    alg: &MbfAlgorithm<S, M>,
    a: AdjacencyOperator<'_>,
    x: &StateVector<M>,
) -> StateVector<M>
where
    S: Adjacency,
    M: Semimodule<S> + 'static,
{
    slf_apply(a, x).filtered(alg.intermediate_filter())
}

fn iterate<S, M>(
    alg: &MbfAlgorithm<S, M>,
    a: AdjacencyOperator<'_>,
    mut x: StateVector<M>,
    filter: &dyn Filter<M>,
) -> Result<MbfOutcome<M>>
where
    S: Adjacency,
    M: Semimodule<S> + 'static,
{
    let mut iterations = 0;
    let mut converged = false;
    loop {
        if alg.hops.is_some_and(|h| iterations >= h) {
            break;
        }
        let next = slf_apply(a, &x).filtered(filter);
        alg.check_size(&next)?;
        if next == x {
            converged = true;
            break;
        }
        x = next;
        iterations += 1;
    }
    Ok(MbfOutcome {
        state: alg.finish(x),
        iterations,
        converged,
    })
}

/// Iterates [`mbf_step`] until the hop cap or a fixpoint.
pub fn mbf_run<S, M>(alg: &MbfAlgorithm<S, M>, a: AdjacencyOperator<'_>) -> Result<MbfOutcome<M>>
where
    S: Adjacency,
    M: Semimodule<S> + 'static,
{
    let x0 = alg.initial_state();
    alg.check_size(&x0)?;
    iterate(alg, a, x0, alg.intermediate_filter())
}

/// `r^V A^h x^(0)`: the same iteration without any intermediate filtering.
pub fn mbf_run_filter_at_end<S, M>(
    alg: &MbfAlgorithm<S, M>,
    a: AdjacencyOperator<'_>,
) -> Result<MbfOutcome<M>>
where
    S: Adjacency,
    M: Semimodule<S> + 'static,
{
    alg.check_size(&alg.init)?;
    iterate(alg, a, alg.init.clone(), &IdentityFilter)
}
