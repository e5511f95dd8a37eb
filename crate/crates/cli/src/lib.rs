//! Experiment orchestration for `kplab`: configuration, parallel sweeps and
//! result emission.

pub mod config;
pub mod error;
pub mod experiments;
pub mod run;
pub mod sweep;

pub use config::{ExperimentConfig, Expectation, Subcommand};
pub use error::{CliError, Result};
pub use run::{run, write_outputs, ResultEnvelope};
pub use sweep::{sweep_parallel, SweepError};
