//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by construction, ordering, and audit operations.
///
/// Variants are grouped by how a caller should react: `Parameter`,
/// `Format`, and `Io` indicate bad input to an API or file; `Admissibility`
/// means the requested object provably cannot exist for these parameters
/// (residue or divisibility condition fails); `Consistency` means two
/// artifacts that must describe the same object do not; `Verification`
/// means a property this library claims to guarantee failed an exact
/// check, which is always a bug.
#[derive(Debug, Error)]
pub enum Error {
    /// A block violates the structural invariants of a design or matrix.
    #[error("block {index}: {reason}")]
    Structural { index: usize, reason: String },

    /// Parameters fail a necessary existence condition.
    #[error("{0}")]
    Admissibility(String),

    /// An argument is outside the domain of the operation.
    #[error("{0}")]
    Parameter(String),

    /// Two artifacts that must agree (e.g. matrix rows vs. design blocks) do not.
    #[error("{0}")]
    Consistency(String),

    /// A message was rejected because it is not valid under the given rule.
    #[error("message {message} is not valid under rule {rule}")]
    NotAuthentic { rule: usize, message: usize },

    /// A guaranteed property failed an exact check; indicates a bug.
    #[error("verification failure: {0}")]
    Verification(String),

    /// Malformed file contents.
    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
