//! Spectral separability criteria for bipartite quantum states.

pub mod cli;
pub mod criteria;
pub mod error;
pub mod gap;
pub mod linalg;
pub mod robustness;
pub mod sampling;
pub mod states;
pub mod wootters;

pub use error::{Error, Result};
