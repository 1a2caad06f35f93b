use thiserror::Error;

/// Errors raised by the operator kernel, the probability layer and the model builders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square with dimension >= 1 (got {rows} rows, row lengths {detail})")]
    NotSquare { rows: usize, detail: String },

    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("dimension {dim} exceeds the configured maximum {max}")]
    DimensionOverflow { dim: usize, max: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is not 1 (got {trace})")]
    InvalidTrace { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("Hermitian eigensolver did not converge")]
    EigenNonConvergence,

    #[error("expectation value has imaginary residue {residue:e}")]
    ImaginaryResidue { residue: f64 },

    #[error("sample space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("invalid sample space: {0}")]
    InvalidSpace(String),

    #[error("invalid probability measure: {0}")]
    InvalidMeasure(String),

    #[error("response value {value} at atom {atom} outside [{lower}, {upper}] (site {site})")]
    ResponseOutOfRange {
        site: u8,
        atom: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("wrong site: expected response function for site {expected}, got site {got}")]
    WrongSite { expected: u8, got: u8 },

    #[error("invalid separable decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("invalid U-family parameters alpha={alpha}, beta={beta}")]
    InvalidUState { alpha: f64, beta: f64 },

    #[error("direction ({x}, {y}, {z}) is not a unit vector (norm {norm})")]
    NonUnitDirection { x: f64, y: f64, z: f64, norm: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
