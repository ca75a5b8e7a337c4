use thiserror::Error;

/// Errors surfaced by the algebra, field, morphism and superspace layers.
#[derive(Error, Debug, Clone)]
pub enum Error {
    #[error("bispinor is not null: |det| = {det_abs:.3e} exceeds tolerance {tol:.3e}")]
    NotNull { det_abs: f64, tol: f64 },
    #[error("zero vector cannot be factored")]
    ZeroVector,
    #[error("planes share a codirection; no finite intersection")]
    ParallelPlanes,
    #[error("intersection lies at infinity (singular incidence system)")]
    AtInfinity,
    #[error("evaluation hit the singular set at {at}")]
    SingularEvaluation { at: String },
    #[error("finite-difference derivative failed to converge (defect {defect:.3e})")]
    DerivativeDivergence { defect: f64 },
    #[error("integrator did not converge after {steps} steps (last defect {defect:.3e})")]
    NoConvergence { steps: usize, defect: f64 },
    #[error("spinor pair is linearly dependent")]
    DegenerateSpan,
    #[error("matrix block is not symmetric (defect {defect:.3e})")]
    NonSymmetric { defect: f64 },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("tangent columns do not share a codirection factor (defect {defect:.3e})")]
    NoCommonFactor { defect: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("coefficient derivative unavailable")]
    DerivativeUnavailable,
    #[error("pushforward violates the null-curve form (defect {defect:.3e})")]
    FormViolation { defect: f64 },
    #[error("bilinearity defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    BilinearityViolation { defect: f64, tol: f64 },
    #[error("embedding constraints inconsistent at order {order} (residual {residual:.3e})")]
    NoSolution { order: usize, residual: f64 },
    #[error("configuration error: {0}")]
    ConfigError(String),
}

pub type Result<T> = std::result::Result<T, Error>;
