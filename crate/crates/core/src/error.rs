use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds {allowed:.3e}")]
    NotHermitian { defect: f64, allowed: f64 },

    #[error("matrix is not an isometry: ‖V*V − I‖_F = {defect:.3e}")]
    NotIsometry { defect: f64 },

    #[error("matrix is not positive definite: minimum eigenvalue {min_eig:.3e}")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("Hermitian eigensolver failed to converge on a {size}x{size} matrix")]
    EigenFailure { size: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("rejection sampling exhausted its budget of {budget} draws")]
    BudgetExhausted { budget: usize },

    #[error("linear program stalled (degenerate pivoting after {iterations} iterations)")]
    LpDegenerate { iterations: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("coefficient bound contradicts the PSD hypothesis: {0}")]
    BoundViolation(String),

    #[error("pencil sequence is not Cauchy: last coefficient gap {gap:.3e} exceeds {allowed:.3e}")]
    NonCauchy { gap: f64, allowed: f64 },

    #[error("no separating pencil found at step {step} within {iterations} iterations")]
    SeparationFailed { step: usize, iterations: usize },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn mismatch(context: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            found,
        }
    }
}
