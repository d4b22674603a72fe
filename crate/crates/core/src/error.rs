use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, VortexError>;

#[derive(Debug, Error)]
pub enum VortexError {
    /// Two vortices are too close for the (unregularized) interaction.
    #[error("singular interaction between vortices {i} and {j} (value {value:e})")]
    Singularity { i: usize, j: usize, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("step failure: {0}")]
    StepFailure(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<VortexError>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl VortexError {
    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            VortexError::Singularity { .. } => "singularity",
            VortexError::Domain(_) => "domain",
            VortexError::InvalidState(_) => "invalid_state",
            VortexError::Convergence { .. } => "convergence",
            VortexError::StepFailure(_) => "step_failure",
            VortexError::Config(_) => "config",
            VortexError::StepFailed { .. } => "step_failed",
            VortexError::Io { .. } => "io",
        }
    }
}
