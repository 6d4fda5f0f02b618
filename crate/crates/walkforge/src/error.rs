//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, WalkError>;

#[derive(Debug, Error)]
pub enum WalkError {
    /// Expression text failed to parse.
    #[error("parse error at byte {offset}: expected {expected}, found {found}")]
    Parse {
        offset: usize,
        expected: String,
        found: String,
    },

    /// A constructor or operation precondition was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two operands live in different index spaces.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A complete interlink requires equal-degree, degree-regular subgraphs.
    #[error(
        "complete interlink requires both subgraphs degree-regular with equal degree \
         (got {left}, {right}; `-` means not degree-regular)"
    )]
    DegreeMismatch { left: String, right: String },

    /// Exact factorization of exp(-it(A+B)) requires [A, B] = 0.
    #[error(
        "adjacency matrices do not commute; the evolution of a sum factors into \
         a gate sequence only when [A, B] = 0"
    )]
    NonCommuting,

    /// Wire indices collided or went out of range.
    #[error("wire conflict: {0}")]
    WireConflict(String),

    /// Diagonal phase patterns must select disjoint sets of basis states.
    #[error("diagonal phase patterns overlap: entries {0} and {1} match a common basis state")]
    OverlappingPatterns(usize, usize),

    /// The spectral oracle only accepts symmetric input.
    #[error("matrix is not symmetric (max |a - a^T| = {max_dev:.3e})")]
    AsymmetricInput { max_dev: f64 },

    /// Desk-scale resource cap exceeded.
    #[error("resource limit exceeded: {what} {value} > cap {cap}")]
    ResourceLimit {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    /// An internal consistency check failed; indicates a bug, not bad input.
    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("circuit JSON error: {0}")]
    Json(String),
}

impl WalkError {
    /// Process exit code for the CLI, documented in `--help`.
    pub fn exit_code(&self) -> i32 {
        match self {
            WalkError::Parse { .. } | WalkError::Json(_) => 2,
            WalkError::InvalidArgument(_)
            | WalkError::DimensionMismatch { .. }
            | WalkError::DegreeMismatch { .. }
            | WalkError::NonCommuting
            | WalkError::WireConflict(_)
            | WalkError::OverlappingPatterns(..)
            | WalkError::AsymmetricInput { .. } => 3,
            WalkError::ResourceLimit { .. } => 5,
            WalkError::Io(_) => 6,
            WalkError::Internal(_) => 7,
        }
    }
}
