use std::marker::PhantomData;
use std::ops::Index;

use rayon::prelude::*;

use super::{Filter, NodeId, Semimodule, Semiring};

/// Element of the power semimodule `M^V`: one node state per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<M> {
    states: Vec<M>,
}

impl<M> StateVector<M> {
    pub fn from_states(states: Vec<M>) -> Self {
        StateVector { states }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[M] {
        &self.states
    }

    pub fn into_states(self) -> Vec<M> {
        self.states
    }

    pub fn iter(&self) -> std::slice::Iter<'_, M> {
        self.states.iter()
    }
}

impl<M: Send + Sync> StateVector<M> {
    /// `r^V x`.
    pub fn filtered(&self, filter: &dyn Filter<M>) -> Self {
        StateVector {
            states: self.states.par_iter().map(|x| filter.project(x)).collect(),
        }
    }
}

impl<M> Index<NodeId> for StateVector<M> {
    type Output = M;

    fn index(&self, v: NodeId) -> &M {
        &self.states[v]
    }
}

/// Coordinatewise lifting of a semimodule over a fixed node universe.
///
/// `M^V` needs to know `|V|` for its neutral element, so this wrapper pairs
/// the vector operations with an explicit dimension instead of implementing
/// [`Semimodule`] directly.
pub struct PowerModule<S, M> {
    pub n: usize,
    _marker: PhantomData<(S, M)>,
}

impl<S: Semiring, M: Semimodule<S>> PowerModule<S, M> {
    pub fn new(n: usize) -> Self {
        PowerModule {
            n,
            _marker: PhantomData,
        }
    }

    pub fn bottom(&self) -> StateVector<M> {
        StateVector::from_states(vec![M::bottom(); self.n])
    }

    pub fn merge(&self, x: &StateVector<M>, y: &StateVector<M>) -> StateVector<M> {
        assert_eq!(x.len(), y.len(), "state vectors over different universes");
        StateVector::from_states(
            x.states
                .par_iter()
                .zip(y.states.par_iter())
                .map(|(a, b)| a.merge(b))
                .collect(),
        )
    }

    pub fn scale(&self, s: &S, x: &StateVector<M>) -> StateVector<M> {
        StateVector::from_states(x.states.par_iter().map(|a| a.scale(s)).collect())
    }
}
