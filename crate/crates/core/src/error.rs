//! Crate error type.

use alloc::string::String;

/// Errors raised by the kernel.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Operands belong to different algebras.
    #[error("algebra kind mismatch: expected {expected:?}, found {found:?}")]
    KindMismatch {
        /// Kind required by the operation.
        expected: crate::lie::AlgebraKind,
        /// Kind supplied.
        found: crate::lie::AlgebraKind,
    },
    /// Component counts disagree.
    #[error("{what}: expected {expected} components, found {found}")]
    CountMismatch {
        /// What was being counted.
        what: &'static str,
        /// Expected count.
        expected: usize,
        /// Supplied count.
        found: usize,
    },
    /// A value or gradient was NaN or infinite.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    /// A phase point does not lie on the requested momentum level or orbit.
    #[error("membership violation: defect {defect:e}")]
    Membership {
        /// Distance from the level set.
        defect: f64,
    },
    /// A parameter record failed validation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Integration diverged.
    #[error("blow-up at t = {time}")]
    BlowUp {
        /// Time of the last step attempted.
        time: f64,
    },
    /// Step size and horizon are incompatible.
    #[error("invalid step: {0}")]
    InvalidStep(String),
    /// A transport between reduced spaces cannot be inverted at the given point.
    #[error("transport not invertible: {0}")]
    NotInvertible(String),
    /// A fiber map moved the base point.
    #[error("fiber map is not fiber-preserving (base moved by {0:e})")]
    NotFiberPreserving(f64),
}

/// Result alias.
pub type Result<T> = core::result::Result<T, Error>;
