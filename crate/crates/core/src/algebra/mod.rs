//! Semirings, zero-preserving semimodules and filters.
//!
//! An MBF-like computation only ever touches node states through three
//! operations: propagate (`scale` by an adjacency entry), aggregate (`merge`)
//! and filter (`Filter::project`). The traits below capture exactly those,
//! and the concrete types in the submodules provide the four semirings the
//! crate ships with.

use std::fmt::Debug;

mod boolean;
mod maxmin;
mod minplus;
mod pathset;
mod power;

pub use boolean::{BoolValue, BoolVector};
pub use maxmin::{MaxMin, WidestMap};
pub use minplus::{DistanceMap, MinPlus};
pub use pathset::{Path, PathSet};
pub use power::{PowerModule, StateVector};

pub type NodeId = usize;

/// A semiring `(S, ⊕, ⊙)` with `zero` neutral for `⊕` and `one` neutral for `⊙`.
pub trait Semiring: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn oplus(&self, other: &Self) -> Self;
    fn odot(&self, other: &Self) -> Self;

    /// Number of stored entries of a sparse carrier (1 for scalars).
    fn support_len(&self) -> usize {
        usize::from(*self != Self::zero())
    }
}

/// A zero-preserving semimodule over `S`: `one ⊙ x = x` and `zero ⊙ x = ⊥`.
pub trait Semimodule<S: Semiring>: Clone + PartialEq + Debug + Send + Sync {
    fn bottom() -> Self;
    fn merge(&self, other: &Self) -> Self;
    fn scale(&self, s: &S) -> Self;

    fn is_bottom(&self) -> bool {
        *self == Self::bottom()
    }

    /// Number of stored (non-neutral) entries; used for size guards.
    fn support_len(&self) -> usize {
        usize::from(!self.is_bottom())
    }

    /// `⊕` over all parts. Implementations with a sparse representation
    /// override this with a single sort-based pass.
    fn aggregate(parts: Vec<Self>) -> Self {
        parts
            .into_iter()
            .reduce(|a, b| a.merge(&b))
            .unwrap_or_else(Self::bottom)
    }
}

/// Every semiring is a zero-preserving semimodule over itself.
impl<S: Semiring> Semimodule<S> for S {
    fn bottom() -> Self {
        S::zero()
    }

    fn merge(&self, other: &Self) -> Self {
        self.oplus(other)
    }

    fn scale(&self, s: &S) -> Self {
        s.odot(self)
    }

    fn support_len(&self) -> usize {
        Semiring::support_len(self)
    }
}

/// Entries of the adjacency matrix of a weighted graph over a semiring.
///
/// `edge(v, w, weight, stretch)` is `a_vw`, the factor applied to the state
/// of `w` when it is propagated to `v`. `stretch` multiplies distances in the
/// ordinary sense; semirings without a notion of length ignore it.
pub trait Adjacency: Semiring {
    fn diagonal(v: NodeId) -> Self;
    fn edge(v: NodeId, w: NodeId, weight: f64, stretch: f64) -> Self;
}

/// A representative projection `r` applied node-wise (`r^V`).
pub trait Filter<M>: Send + Sync {
    fn project(&self, x: &M) -> M;
}

/// `r = id`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityFilter;

impl<M: Clone> Filter<M> for IdentityFilter {
    fn project(&self, x: &M) -> M {
        x.clone()
    }
}
