use std::path::PathBuf;

use thiserror::Error;

use crate::evolve::TrajectoryRecord;
use crate::spectral::SpectralField;

pub type Result<T> = std::result::Result<T, MuskatError>;

#[derive(Debug, Error)]
pub enum MuskatError {
    /// Inconsistent grid, unsupported option, or out-of-range parameter.
    #[error("configuration error: {0}")]
    Config(String),

    /// Config file problem tied to a specific line.
    #[error("config line {line}: {message}")]
    ConfigLine { line: usize, message: String },

    /// An operation was called outside its domain.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A data invariant (Hermitian symmetry, finiteness, ...) does not hold.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// The integrator produced a non-finite state.
    #[error("blow-up at t = {time:.6e} (step {step}): {reason}")]
    BlowUp {
        time: f64,
        step: usize,
        reason: String,
        last_valid: Box<SpectralField>,
        record: Box<TrajectoryRecord>,
    },

    #[error("malformed input{}: {message}", path.as_ref().map(|p| format!(" in {}", p.display())).unwrap_or_default())]
    Parse {
        path: Option<PathBuf>,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl MuskatError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        MuskatError::Config(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        MuskatError::Precondition(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        MuskatError::Parse {
            path: None,
            message: msg.into(),
        }
    }
}
