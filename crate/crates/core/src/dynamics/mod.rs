//! Time integration of the vorticity equation and of passive transport by an
//! archived velocity.

mod config;
mod solver;
mod tracked;
mod trajectory;

pub use config::{Forcing, SimulationConfig};
pub use solver::{evolve, rhs, transport_linear};
pub use tracked::{exp_entropy_gap, exponent_schedule, ptracked_norm, TrackedNorm};
pub use trajectory::Trajectory;
