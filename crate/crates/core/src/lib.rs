//! Hypergraph neural network solver for constrained combinatorial
//! optimization.

pub mod analysis;
pub mod baselines;
pub mod distributed;
pub mod error;
pub mod hypergraph;
pub mod mapping;
pub mod model;
pub mod pipeline;
pub mod problems;
pub mod rng;

pub use error::{Error, Result};
