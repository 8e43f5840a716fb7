//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Parameter or configuration failed validation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An operation was called outside its documented domain.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// A normalizing denominator is too close to zero to divide by.
    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),

    /// Exact division by zero in a closed-form expression.
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    /// The side-feature threshold inequality has no positive solution:
    /// log argument below 1 means no peak for any positive arm delay.
    #[error("side threshold undefined: log argument {arg:.6e} < 1 (no peak for any positive delay)")]
    UndefinedThreshold { arg: f64 },

    /// Requested simulation would produce more events than the generator cap.
    #[error("expected event count {expected:.3e} exceeds generator capacity {limit:.1e}")]
    CapacityExceeded { expected: f64, limit: f64 },

    /// rate × correlation-window product too large for the thinning scheme.
    #[error("validity ratio {ratio:.4} exceeds hard limit {limit}")]
    ValidityRatio { ratio: f64, limit: f64 },

    /// Tag sequence is not strictly increasing.
    #[error("tags not strictly increasing at index {index}")]
    UnsortedInput { index: usize },

    /// A histogram bin counter would overflow.
    #[error("histogram bin counter overflow")]
    CountOverflow,

    /// Tag-file header is unreadable or inconsistent.
    #[error("malformed header: {0}")]
    MalformedHeader(String),

    /// Tag file ended before the declared number of records.
    #[error("truncated records: header declares {expected}, file holds {got}")]
    TruncatedRecord { expected: u64, got: u64 },

    /// Bytes remain after the declared records.
    #[error("trailing data after declared records")]
    TrailingData,

    /// Timestamps in a tag file are not strictly increasing.
    #[error("non-monotonic timestamp at record {index}")]
    NonMonotonicTimestamp { index: u64 },

    /// A line of a text tag file failed to parse.
    #[error("text tag line {line}: {reason}")]
    TextParse { line: usize, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
