//! Pseudo-spectral laboratory for the vanishing-viscosity limit of 2D
//! incompressible flow on the torus `[0, 2π)²`.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`], [`field`], [`spectral`]: periodic grid, sampled fields and
//!   Fourier operators (Biot–Savart, derivatives, mollification, dealiasing).
//! * [`dynamics`]: integrating-factor RK4 for the vorticity equation and the
//!   linear transport/diffusion problems driven by an archived velocity.
//! * [`fields`]: initial-data factories (eigenmodes, Taylor–Green, power-law
//!   random fields, disk and Koch-snowflake vortex patches).
//! * [`diagnostics`]: norms, budgets, distribution functions, Besov
//!   seminorms and velocity-gradient functionals.
//! * [`lagrangian`]: deterministic and stochastic flow maps, Monte-Carlo
//!   vorticity reconstruction and the fluctuation–dissipation check.

pub mod archive;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod fields;
pub mod grid;
pub mod interp;
pub mod lagrangian;
pub mod spectral;

pub use error::{Error, Result};
pub use field::{ScalarField, VectorField};
pub use archive::VelocityArchive;
pub use grid::GridSpec;
