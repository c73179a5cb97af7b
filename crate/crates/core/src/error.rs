//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation needs a nonzero vector")]
    ZeroVector,

    #[error("power iterate collapsed to the zero vector")]
    ZeroIterate,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric: max |a_ij - a_ji| = {max_dev:.3e} exceeds {tol:.3e}")]
    NotSymmetric { max_dev: f64, tol: f64 },

    #[error("{path}: line {line}: {msg}")]
    MtxParse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: matrix is {rows}x{cols}, expected square")]
    NotSquare {
        path: PathBuf,
        rows: usize,
        cols: usize,
    },

    #[error("{path}: line {line}: non-finite entry")]
    NonFiniteEntry { path: PathBuf, line: usize },

    #[error("QR iteration exhausted its sweep budget: {deflated} of {total} eigenvalues isolated")]
    QrNoConvergence { deflated: usize, total: usize },

    #[error("allocation of {requested} bytes failed or exceeds addressable memory")]
    OutOfMemory { requested: u128 },

    #[error("need at least {needed} usable records, got {got}")]
    InsufficientRecords { needed: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
