use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("order mismatch: expected {expected}, found {found}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("invalid tolerance {0}: must be positive and finite")]
    InvalidTolerance(f64),

    #[error("invalid increment: {0}")]
    InvalidIncrement(String),

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("pole of the channel function at channel {channel}")]
    Pole { channel: usize },

    #[error("channel {channel} has a zero or pole at the evaluation point")]
    ChannelSingularity { channel: usize },

    #[error("degenerate polynomial: {0}")]
    DegeneratePolynomial(String),

    #[error("root finder failed on channel {channel}: {reason}")]
    SolverFailure { channel: usize, reason: String },

    #[error("recombination would produce {count} candidate roots, limit is {limit}")]
    RecombinationOverflow { count: u128, limit: u128 },
}
