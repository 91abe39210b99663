//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by instance validation, oracles, algorithms and reductions.
#[derive(Debug, Error)]
pub enum Error {
    /// An index or vector length does not match the instance's declared dimensions.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A money value could not be represented (negative, non-finite, or out of range).
    #[error("invalid money value: {0}")]
    Money(String),

    /// An instance failed structural validation.
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// A client has no finite connection cost, so it can never be served.
    #[error("client {0} has no finite connection cost")]
    InfeasibleClient(usize),

    /// A row demands more coverage than its support can ever provide.
    #[error("row {0} demands more coverage than its support provides")]
    InfeasibleRow(usize),

    /// No augmentation of the current solution can satisfy the given requests.
    #[error("no augmentation can satisfy the given requests")]
    NoAugmentation,

    /// An exact oracle was invoked above its instance-size guard.
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    /// A file failed to parse; the path and the underlying position are included.
    #[error("parse error in {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// The weighted KL divergence is undefined: some x[i] > 0 while y[i] = 0.
    #[error("weighted KL divergence undefined: x[{0}] > 0 but y[{0}] = 0")]
    KlDomain(usize),

    /// An internal invariant that should hold by construction was violated (a bug).
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    /// The requested model/algorithm/instance combination is not supported.
    #[error("unsupported combination: {0}")]
    Unsupported(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
