//! Batch front-end for the `deadcore` laboratory.
//!
//! Each subcommand reads an [`ExperimentConfig`], writes one or more CSV tables
//! into the output directory and a `manifest.json` describing the run.

// `!(x > 0.0)` is how validation rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, Command, RunOptions};
pub use config::ExperimentConfig;

/// Failures of a run, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Core(#[from] deadcore::Error),

    #[error("I/O error: {0}")]
    Io(String),

    /// Outputs are written before this is returned.
    #[error("no convergence: {0}")]
    NotConverged(String),
}

impl CliError {
    /// 2 for bad input, 3 for non-convergence, 1 for failed writes.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Core(_) => 2,
            CliError::NotConverged(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}
