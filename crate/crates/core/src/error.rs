use thiserror::Error;

/// Errors raised by the numerical kernels.
///
/// Variants split into input errors (bad data or preconditions) and numerical
/// diagnostics (the computation ran but could not certify its result).
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CarnotError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("generating set does not Lie-generate the algebra (span stabilized at dimension {stabilized_dim})")]
    NotBracketGenerating { stabilized_dim: usize },
    #[error("structure constants break the grading: [{i},{j}] has weight {coeff:e} on basis vector {k}")]
    GradingInconsistency { i: usize, j: usize, k: usize, coeff: f64 },
    #[error("step {step} exceeds the supported BCH truncation order 6")]
    UnsupportedStep { step: usize },
    #[error("word factorization did not converge (residual {residual:e})")]
    OutOfChartRadius { residual: f64 },
    #[error("no horizontal path reached the endpoint (best residual {residual:e})")]
    NoFeasiblePath { residual: f64 },
    #[error("degenerate fit: only {usable} usable scales")]
    DegenerateFit { usable: usize },
    #[error("map is not symplectic (loop residual {residual:e})")]
    NotSymplectic { residual: f64 },
    #[error("integration produced non-finite values after t = {last_valid_time}")]
    IntegrationBlowup { last_valid_time: f64 },
    #[error("invariant undefined: {0}")]
    UndefinedInvariant(String),
    #[error("curve is not Lipschitz (difference quotients grow like mesh^{slope:.3})")]
    NotLipschitz { slope: f64 },
}

impl CarnotError {
    /// True for diagnostics produced by a computation that ran to completion
    /// but failed a certificate, false for bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            CarnotError::InvalidInput(_)
                | CarnotError::UnsupportedStep { .. }
                | CarnotError::NotBracketGenerating { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, CarnotError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(CarnotError::InvalidInput(msg.into()))
}
