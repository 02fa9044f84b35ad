use thiserror::Error;

/// Failures raised by the geometry, integration and tube-shape layers.
///
/// Verification suites never surface a theorem failing as an `Error`; those
/// land in a [`VerificationReport`](crate::lab::VerificationReport). Errors
/// here mean the numerics themselves could not proceed.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {point:?} is outside the domain of chart {chart}")]
    Domain { chart: usize, point: Vec<f64> },

    #[error("metric is degenerate at {point:?} (smallest eigenvalue {min_eigenvalue:e})")]
    DegenerateMetric { point: Vec<f64>, min_eigenvalue: f64 },

    #[error("differentiation failed: {0}")]
    DifferentiationFailure(String),

    #[error("vector is not unit length (|v|^2 = {norm_sq})")]
    NotUnitVector { norm_sq: f64 },

    #[error("trajectory left every chart at t = {t}")]
    ChartExit { t: f64 },

    #[error("step controller could not meet tolerance at t = {t} (error estimate {estimate:e})")]
    StepFailure { t: f64, estimate: f64 },

    #[error("parametrization is not an immersion at u = {u:?}")]
    ImmersionFailure { u: Vec<f64> },

    #[error("Jacobi matrix is singular at t = {t} (focal point)")]
    SingularJacobian { t: f64 },

    #[error("slope fit needs at least 4 usable values, got {usable}")]
    FitFailure { usable: usize },

    #[error("catalog case {case} is not admitted: gate {gate} failed")]
    GateFailed { case: String, gate: String },

    #[error("unknown catalog case {0}")]
    UnknownCase(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
