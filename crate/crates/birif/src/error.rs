use thiserror::Error;

/// Errors produced by the birif library.
#[derive(Debug, Error)]
pub enum Error {
    /// Syntax error while parsing a polynomial expression.
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    /// A polynomial exceeded the supported degree cap.
    #[error("degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: u32, cap: u32 },

    /// An operation that requires a nonzero polynomial received the zero polynomial.
    #[error("the zero polynomial has no bidegree")]
    ZeroPolynomial,

    /// A reflection bidegree failed to dominate the support of the polynomial.
    #[error("reflection bidegree ({0}, {1}) does not dominate the support")]
    BidegreeTooSmall(u32, u32),

    /// Construction of a rational inner function from an unusable denominator.
    #[error("invalid denominator: {0}")]
    InvalidDenominator(String),

    /// A slice of the numerator vanished identically (shared-factor symptom).
    #[error("degenerate slice: numerator vanishes identically at the given parameter")]
    DegenerateSlice,

    /// An argument was outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A least-squares fit did not meet its acceptance thresholds.
    #[error("fit rejected: {0}")]
    FitRejected(String),

    /// The eigenvalue or refinement iteration failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A branch trace lost or gained roots along the arc.
    #[error("root count changed along the arc at sample {sample}")]
    RootCountChanged { sample: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
