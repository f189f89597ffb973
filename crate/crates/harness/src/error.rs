use thiserror::Error;

use crate::sweep::GuardReport;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] yudovich::Error),

    #[error("config syntax: {0}")]
    Syntax(#[from] ini::ParseError),

    #[error("config [{section}] {key}: {reason}")]
    Config {
        section: String,
        key: String,
        reason: String,
    },

    #[error("unknown experiment `{0}` (expected E1 to E7)")]
    UnknownExperiment(String),

    #[error("experiment spec: {0}")]
    Spec(String),

    #[error("viscosity ladder: {0}")]
    Ladder(String),

    #[error("rate fit needs at least {min} finite points, got {got}")]
    TooFewPoints { min: usize, got: usize },

    #[error("resolution guard failed: {0}")]
    Resolution(GuardReport),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

pub(crate) fn config_error(section: &str, key: &str, reason: impl Into<String>) -> HarnessError {
    HarnessError::Config {
        section: section.to_string(),
        key: key.to_string(),
        reason: reason.into(),
    }
}
