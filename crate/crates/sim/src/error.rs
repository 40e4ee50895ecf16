use std::path::PathBuf;

use thiserror::Error;

/// Failures reading or writing the on-disk formats.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported {what} version {found} (expected {expected})")]
    Version {
        what: &'static str,
        found: u32,
        expected: u32,
    },
    #[error("expected a {expected} map, found {found}")]
    KindMismatch { expected: &'static str, found: String },
    #[error("malformed file: {0}")]
    Malformed(String),
    #[error("{0}")]
    Invalid(#[from] ckm_core::Error),
}

impl FormatError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        FormatError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        FormatError::Parse {
            line,
            msg: msg.into(),
        }
    }
}

/// Configuration rejected before any work starts.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("{field} must be at least {min} (got {got})")]
    TooSmall {
        field: &'static str,
        min: u64,
        got: u64,
    },
    #[error("{0}")]
    Invalid(String),
}
