use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("snapshot {path}: {kind}")]
    Snapshot { path: PathBuf, kind: SnapshotError },

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SnapshotError {
    #[error("bad magic {0:?}, expected \"CHFS\"")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0}")]
    Version(u32),
    #[error("truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },
    #[error("dimension overflow: {0}")]
    DimensionOverflow(String),
    #[error("trailing bytes after payload")]
    TrailingBytes,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}
