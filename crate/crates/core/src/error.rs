use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solver, the diagnostics and the particle code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two >= 16")]
    InvalidGrid(usize),

    #[error("grid mismatch: expected n = {expected}, found n = {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("field has nonzero mean {mean:e}")]
    MeanViolation { mean: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("CFL violated at step {step}: courant number {courant:.3} > 0.5")]
    Cfl { step: usize, courant: f64 },

    #[error("non-finite value encountered at step {step}")]
    NotFinite { step: usize },

    #[error("velocity archive does not cover t = {t} (archive spans [{start}, {end}])")]
    Coverage { t: f64, start: f64, end: f64 },

    #[error("velocity archive gap of {gap} exceeds the declared maximum spacing {max}")]
    ArchiveGap { gap: f64, max: f64 },

    #[error("velocity archive snapshot at t = {t} is not divergence-free (max |div u| = {div:e})")]
    NotSolenoidal { t: f64, div: f64 },

    #[error("sample count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("viscosity must be positive for this operation")]
    Inviscid,

    #[error("stochastic representation requires an unforced archive")]
    ForcedArchive,

    #[error("archive was produced with nu = {archive}, requested nu = {requested}")]
    ViscosityMismatch { archive: f64, requested: f64 },

    #[error("koch polygon with {iterations} iterations is degenerate on an n = {n} grid")]
    DegeneratePolygon { iterations: u32, n: usize },

    #[error("malformed snapshot {path}: {reason}")]
    Snapshot { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
