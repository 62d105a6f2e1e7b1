//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke a shape or length contract.
    #[error("contract violation in {context}: expected {expected}, got {got}")]
    ShapeMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A numeric input or intermediate that must be finite was not.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// Configuration rejected, with the offending key named.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// An operation that needs at least one element received none.
    #[error("empty batch in {0}")]
    EmptyBatch(&'static str),

    /// Requested structure cannot be built (e.g. too many rooms for a grid).
    #[error("infeasible request: {0}")]
    Infeasible(String),

    /// Episode stepped past its fixed length.
    #[error("episode already finished at t={0}")]
    EpisodeOver(usize),

    /// Every cell of an action mask is disallowed.
    #[error("action mask for {0} allows no cells")]
    AllMasked(&'static str),

    /// Collision resolution found no free cell.
    #[error("no free cell available for collision resolution")]
    NoFreeCell,

    /// Rejection sampling exceeded its draw budget.
    #[error("rejection sampling exceeded {0} draws; preset likely misconfigured")]
    RejectionOverflow(u64),

    /// Malformed serialized data (checkpoint, replay, log).
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
