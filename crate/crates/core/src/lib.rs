//! Monotone set-function maximization over partition matroids.
//!
//! The crate provides the constraint type, objective oracles, the selection
//! algorithms, tools for measuring how far an objective is from submodular,
//! and two application objectives: boosted influence spread and determinant
//! based video summarization.

pub mod algorithms;
pub mod error;
pub mod influence;
pub mod matroid;
pub mod oracle;
pub mod quantify;
pub mod rng;
pub mod summarization;
pub mod synthetic;

pub use algorithms::{Algorithm, RunResult, TraceStep};
pub use error::{Error, Result};
pub use matroid::{ElementId, PartitionMatroid, Subset};
pub use oracle::{CountingOracle, Normalized, Objective};
pub use quantify::{NonSubmodParams, RatioReport};
