//! Experiment runner behind the `partmax` binary.

pub mod config;
pub mod error;
pub mod experiment;
pub mod workload;

pub use config::{App, ExperimentConfig, Overrides, ParamChoice, Vary};
pub use error::{CliError, CliResult};
pub use experiment::{
    bounds, quantify, run, sweep, sweep_with, BoundsReport, RunReport, RunRow, SweepResult,
};
pub use workload::Workload;
