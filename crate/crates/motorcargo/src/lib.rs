//! Runs the motor-cargo experiments: TOML configs, parallel replica
//! ensembles, CSV and JSON artifacts, and post-run checks.

pub mod config;
pub mod ensemble;
pub mod experiments;
pub mod output;
pub mod report;
pub mod theory;

pub use config::{ExperimentSpec, Overrides};
pub use motorcargo_core as core;
pub use report::Report;
