use thiserror::Error;

/// Errors raised by the algebra, functional and order-calculus routines.
#[derive(Debug, Error)]
pub enum FuncordError {
    #[error("construction error: {0}")]
    Construction(String),

    #[error("operands live on different algebras ({left} vs {right})")]
    AlgebraMismatch { left: String, right: String },

    #[error("length mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("functional is not representable: {condition} ({detail})")]
    NotRepresentable {
        condition: RepresentabilityCondition,
        detail: String,
    },

    #[error("GNS reconstruction residual {residual:.3e} exceeds {bound:.3e}")]
    VerificationFailed { residual: f64, bound: f64 },

    #[error("no convergence after {iterations} doubling steps (last increment {increment:.3e})")]
    NoConvergence { iterations: usize, increment: f64 },

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("not dominated: range residual {residual:.3e}")]
    NotDominated { residual: f64 },

    #[error("order violation: {0}")]
    OrderViolation(String),

    #[error("tolerance conflict: {0}")]
    ToleranceConflict(String),

    #[error("operation requires a full matrix algebra, got {0}")]
    NotMatrixAlgebra(String),

    #[error("cross-check failed: {what} differs by {diff:.3e} (bound {bound:.3e})")]
    CrossCheckFailed { what: String, diff: f64, bound: f64 },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl FuncordError {
    /// True for failures that come from the mathematics rather than from I/O or input parsing.
    pub fn is_mathematical(&self) -> bool {
        !matches!(
            self,
            FuncordError::Json(_)
                | FuncordError::Io(_)
                | FuncordError::Construction(_)
                | FuncordError::AlgebraMismatch { .. }
                | FuncordError::SizeMismatch { .. }
                | FuncordError::NotMatrixAlgebra(_)
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FuncordError::Construction(_) => "construction",
            FuncordError::AlgebraMismatch { .. } => "algebra_mismatch",
            FuncordError::SizeMismatch { .. } => "size_mismatch",
            FuncordError::NotRepresentable { .. } => "not_representable",
            FuncordError::VerificationFailed { .. } => "verification_failed",
            FuncordError::NoConvergence { .. } => "no_convergence",
            FuncordError::InvalidDecomposition(_) => "invalid_decomposition",
            FuncordError::NotDominated { .. } => "not_dominated",
            FuncordError::OrderViolation(_) => "order_violation",
            FuncordError::ToleranceConflict(_) => "tolerance_conflict",
            FuncordError::NotMatrixAlgebra(_) => "not_matrix_algebra",
            FuncordError::CrossCheckFailed { .. } => "cross_check_failed",
            FuncordError::Json(_) => "json",
            FuncordError::Io(_) => "io",
        }
    }
}

/// Which of the representability conditions failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresentabilityCondition {
    /// The functional is not positive on squares.
    Positivity,
    /// The value vector is not bounded by the quadratic form (`|f(a)|^2 <= M f(a*a)` fails).
    CyclicBound,
    /// Left multiplication does not descend to the GNS quotient.
    QuotientAction,
}

impl std::fmt::Display for RepresentabilityCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RepresentabilityCondition::Positivity => "positivity",
            RepresentabilityCondition::CyclicBound => "cyclic_bound",
            RepresentabilityCondition::QuotientAction => "quotient_action",
        };
        f.write_str(s)
    }
}

pub type Result<T> = std::result::Result<T, FuncordError>;
