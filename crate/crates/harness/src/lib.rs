//! Experiment harness for the armpa planners: run configuration, single runs,
//! seeded Monte Carlo batches, summary statistics and SVG figures with CSV
//! twins. The `armpa` binary is a thin wrapper over [`cli::run`].

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod monte_carlo;
pub mod plots;
pub mod stats;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use monte_carlo::{monte_carlo, Batch, Mode};
pub use stats::{BatchStats, Quantiles};
