use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the dense engine cap of {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("index {index} out of range for domain of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("query budget exhausted after {queries} queries (possibly no good element)")]
    BudgetExhausted { queries: u64 },

    #[error("phase solver did not converge, residual {residual:e}")]
    PhaseSolve { residual: f64 },

    #[error("promise violated: good-outcome probability {probability} is neither 0 nor 1")]
    PromiseViolated { probability: f64 },

    #[error("truth table: {0}")]
    TruthTable(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
