use thiserror::Error;

use crate::regions::RatePair;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("region is unbounded in the positive quadrant")]
    Unbounded,

    #[error("inner region is not contained in the outer region; witness ({:.6}, {:.6})", .0.r1, .0.r2)]
    NotNested(RatePair),

    #[error("index {index} out of range 1..={len}")]
    OutOfRange { index: usize, len: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("infeasible budget: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
