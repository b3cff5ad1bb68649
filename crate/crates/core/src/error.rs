use std::io;

use thiserror::Error;

/// Errors produced by polycon construction, analysis and export.
#[derive(Debug, Error)]
pub enum PolyconError {
    #[error("invalid polycon: {0}")]
    InvalidSpec(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("resolution {got} is below the minimum of {min}")]
    Resolution { got: usize, min: usize },

    #[error("unsupported method: {0}")]
    UnsupportedMethod(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("mesh integrity violated: {0}")]
    Integrity(String),

    #[error("template layout failed: {0}")]
    Layout(String),

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("rolling simulation failed: {0}")]
    Simulation(String),

    #[error("nothing to export: {0}")]
    Empty(String),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl PolyconError {
    /// True for errors caused by bad caller input rather than a broken invariant.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            PolyconError::InvalidSpec(_)
                | PolyconError::Domain(_)
                | PolyconError::Resolution { .. }
                | PolyconError::UnsupportedMethod(_)
                | PolyconError::Empty(_)
        )
    }
}

impl From<csv::Error> for PolyconError {
    fn from(err: csv::Error) -> Self {
        if err.is_io_error() {
            match err.into_kind() {
                csv::ErrorKind::Io(io) => PolyconError::Io(io),
                other => PolyconError::Serialization(format!("{other:?}")),
            }
        } else {
            PolyconError::Serialization(err.to_string())
        }
    }
}

impl From<serde_json::Error> for PolyconError {
    fn from(err: serde_json::Error) -> Self {
        if err.is_io() {
            PolyconError::Io(err.into())
        } else {
            PolyconError::Serialization(err.to_string())
        }
    }
}

pub type Result<T> = std::result::Result<T, PolyconError>;
