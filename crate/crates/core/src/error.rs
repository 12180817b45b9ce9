use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("outcome space mismatch")]
    OutcomeSpaceMismatch,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("invalid density operator: {0}")]
    InvalidState(String),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid outcome space: {0}")]
    InvalidOutcomeSpace(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("eigendecomposition did not converge (residual {residual:e})")]
    Eigensolver { residual: f64 },

    #[error("contractivity violated: squared error {radicand:e} is below the roundoff floor")]
    ContractivityViolation { radicand: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;
