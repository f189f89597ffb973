//! Experiment registry, viscosity sweeps, rate fitting and reporting for the
//! `yudovich` solver.
//!
//! Each of the seven experiments takes a fully resolved [`ExperimentSpec`]
//! (defaults, then the config file) and returns an [`ExperimentReport`] of
//! diagnostic rows, fits, plots and pass/fail checks.

pub mod config;
pub mod constants;
pub mod error;
pub mod experiments;
pub mod rate;
pub mod report;
pub mod seed;
pub mod spec;
pub mod svg;
pub mod sweep;

pub use config::RunConfig;
pub use constants::Constants;
pub use error::{HarnessError, Result};
pub use experiments::run_experiment;
pub use rate::{log_log_fit, rate_fit, RateFit};
pub use report::{Check, ExperimentReport};
pub use spec::{ExperimentId, ExperimentSpec, InitialData, ViscosityLadder};
