use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid subsystem specification: {0}")]
    InvalidSubsystems(String),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("trace is not 1 (got {0:.12})")]
    InvalidTrace(f64),

    #[error("vector is not normalized (norm {0:.12})")]
    NotNormalized(f64),

    #[error("POVM elements do not sum to identity (deviation {0:.3e})")]
    IncompletePovm(f64),

    #[error("map is not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("basis is not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("entropic quantity is negative beyond round-off: {0:.3e}")]
    NegativeQuantity(f64),

    #[error("support of first state is not contained in support of second (residual {0:.3e})")]
    SupportViolation(f64),

    #[error("linear system is singular")]
    Singular,

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("inconsistent SDP: {0}")]
    InconsistentProblem(String),

    #[error("SDP solve failed: {0}")]
    SdpFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
