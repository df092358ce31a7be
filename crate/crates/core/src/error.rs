//! Error type shared by construction, generators, and analyses.

use thiserror::Error;

/// Everything that can go wrong while building or analyzing point sets.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 1 (got {0})")]
    BadDimension(usize),

    #[error("point {index} has {got} coordinates, expected {expected}")]
    MixedDimensions {
        index: usize,
        got: usize,
        expected: usize,
    },

    #[error("point {index} has a non-finite coordinate")]
    NonFinite { index: usize },

    #[error("point {index} lies outside the closed unit ball (|p| = {norm})")]
    OutsideUnitBall { index: usize, norm: f64 },

    #[error("points {first} and {second} are coordinate-identical")]
    DuplicatePoint { first: usize, second: usize },

    #[error("operation needs at least {needed} points (got {got})")]
    TooFewPoints { needed: usize, got: usize },

    #[error("{0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for parameter validation failures.
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
