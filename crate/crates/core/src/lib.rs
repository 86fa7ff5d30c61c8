//! Algebraic MBF-like computations over semirings, the level-sampled
//! simulated graph `H`, and FRT tree embeddings built on top of them.

pub mod algebra;
pub mod apps;
pub mod engine;
pub mod error;
pub mod frt;
pub mod graph;
pub mod hopset;
pub mod rng;
pub mod simgraph;

pub use error::{MbfError, Result};
