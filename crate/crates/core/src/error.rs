use thiserror::Error;

use crate::solver::SolveTrace;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("agent index {index} out of range for n = {n}")]
    AgentOutOfRange { index: usize, n: usize },

    #[error("round index {round} out of range for T = {rounds}")]
    RoundOutOfRange { round: usize, rounds: usize },

    #[error("unsatisfiable family: {0}")]
    UnsatisfiableFamily(String),

    #[error("beta must lie in (0, 1), got {0}")]
    BetaOutOfRange(f64),

    #[error("enumeration too large: {count} members exceed limit {limit}")]
    EnumerationTooLarge { count: u128, limit: u128 },

    #[error("search space too large: {size} points exceed limit {limit}")]
    SearchSpaceTooLarge { size: u128, limit: u128 },

    #[error("internal consistency violation: {0}")]
    Internal(String),

    #[error("iteration guard of {limit} iterations exceeded")]
    IterationGuard {
        limit: u64,
        trace: Box<SolveTrace>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
