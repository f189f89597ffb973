//! Deterministic and stochastic flow maps through archived velocities.
//!
//! Noise is additive and shared by every label within one realization;
//! realization `r` draws from stream `r` of a ChaCha generator seeded with the
//! top-level seed, so ensembles are reproducible and independent of the
//! order in which realizations are scheduled.

mod flow;
mod representation;
mod separation;
mod stats;

pub use flow::{advect, back_to_labels, AnalyticVelocity, FlowParams, ParticleEnsemble, Scheme, VelocitySource};
pub use representation::{fdr_check, mc_vorticity, write_point_estimates, FdrOptions, FdrReport};
pub use separation::{pair_separation, HolderFit, SeparationOptions};
pub use stats::{PointEstimate, RunningStats};

#[cfg(test)]
mod tests;
