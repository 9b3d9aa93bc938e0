use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter violates a precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A data file does not follow its declared format.
    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    /// A tiny-instance enumeration would exceed the allowed budget.
    #[error("instance too large: {message} (estimated cost {cost})")]
    Limit { message: String, cost: u128 },

    /// A numeric procedure could not produce a usable result.
    #[error("computation failed: {0}")]
    Compute(String),

    /// An experiment cell failed; carries its grid coordinates.
    #[error("cell (n={n}, k={k}, repeat={repeat}): {source}")]
    Cell {
        n: usize,
        k: usize,
        repeat: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn format(offset: u64, msg: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Broad category used by the command-line front end for exit codes.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Parameter(_) | Error::Limit { .. } => ErrorCategory::Usage,
            Error::Format { .. } | Error::Io { .. } | Error::Csv(_) | Error::Json(_) => {
                ErrorCategory::Data
            }
            Error::Compute(_) => ErrorCategory::Compute,
            Error::Cell { source, .. } => source.category(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Usage,
    Data,
    Compute,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
