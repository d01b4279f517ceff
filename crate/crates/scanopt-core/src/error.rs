//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter violates its positivity constraint.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The requested model/parameter combination has no defined form.
    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),

    /// `jω` coincides with an eigenvalue; the resolvent is singular there.
    #[error("frequency {omega} rad/s coincides with a system eigenvalue")]
    SingularFrequency { omega: f64 },

    /// Integration step exceeds the stability guard for the stiffest mode.
    #[error("step {dt} s too large; stability requires dt <= {limit} s")]
    StepTooLarge { dt: f64, limit: f64 },

    /// Certification requires a converged solution.
    #[error("solution not converged; cannot certify")]
    NotConverged,

    /// No sign-consistent adjoint exists for the given switching structure.
    #[error("certification failed: {0}")]
    CertificationFailed(String),

    /// Two series must share dt and duration to be compared pointwise.
    #[error("series grids do not match: {0}")]
    MismatchedGrids(String),

    /// The tracking run never settled into steady tracking.
    #[error("tracking never reached steady state")]
    NotSteady,

    /// A mirror deflection left the half-plane the projection is defined on.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// The calibration data does not constrain the fitted parameter.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// A data source does not cover the requested span.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}
