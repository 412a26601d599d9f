//! Error type shared by every module in the crate.

use thiserror::Error;

/// Unified error enum. Variants mirror the failure modes of the public
/// operations; construction-time invariant violations use [`DetnetError::Invalid`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetnetError {
    /// A matrix handed to an eigendecomposition or norm routine is not
    /// Hermitian within the construction tolerance (1e-10 entrywise).
    #[error("matrix is not hermitian within tolerance")]
    NotHermitian,

    /// A matrix expected to be positive semidefinite has an eigenvalue
    /// below the PSD slack of -1e-10.
    #[error("matrix has an eigenvalue below the psd tolerance")]
    NotPsd,

    /// A POVM element (typically the fail element of an unambiguous
    /// construction) is not a positive operator; signals bad parameters.
    #[error("povm element fails the positivity check")]
    NotPositive,

    /// Two operands have incompatible dimensions.
    #[error("operand dimensions do not match: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    /// Hypothesis priors are negative or do not sum to one within 1e-12.
    #[error("priors must be nonnegative and sum to one")]
    BadPriors,

    /// A hypothesis label has no entry in the outcome map.
    #[error("hypothesis label {0:?} has no outcome mapping")]
    UnmappedLabel(String),

    /// The interaction angle makes the requested construction degenerate
    /// (all hypothesis states coincide, or a needed operator is singular).
    #[error("theta is degenerate for this construction")]
    DegenerateTheta,

    /// A bracketing root finder was given an interval on which the
    /// objective does not change sign.
    #[error("no sign change on the bracket")]
    NoSignChange,

    /// Catch-all for invalid arguments and violated construction invariants.
    #[error("invalid value: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, DetnetError>;
