use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (relative asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("metric matrix is ill-conditioned or indefinite (min/max eigenvalue ratio {0:.3e})")]
    IllConditionedMetric(f64),
    #[error("vector is not majorized by the all-ones vector")]
    MajorizationError,
    #[error("column {0} has zero norm")]
    DegenerateColumn(usize),
    #[error("imaginary residue {imag:.3e} on real part {real:.3e}")]
    ImaginaryResidue { real: f64, imag: f64 },
    #[error("weights must be positive and strictly decreasing")]
    InvalidWeights,
    #[error("operator is not negative definite (largest eigenvalue {0:.3e})")]
    NotNegativeDefinite(f64),
    #[error("penalty mu = {mu} must exceed |lambda_min| = {bound}")]
    MuTooSmall { mu: f64, bound: f64 },
    #[error("inconsistent block specification: {0}")]
    InconsistentSpec(String),
    #[error("point already has the minimizer form")]
    AlreadyMinimal,
    #[error("no descent perturbation found: {0}")]
    EscapeFailed(String),
    #[error("vector lies in the column span (residual {0:.3e})")]
    SpanError(f64),
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    IndexError { index: usize, num_qubits: usize },
    #[error("{0} qubits exceeds the dense limit of 12")]
    TooLarge(usize),
    #[error("objective returned a non-finite value")]
    NonFiniteObjective,
    #[error("line search failed after {0} backtracks")]
    LineSearchFailure(usize),
    #[error("io error on {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Errors caused by malformed or inconsistent inputs rather than numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::DimensionMismatch(_)
                | Error::NotHermitian(_)
                | Error::MajorizationError
                | Error::InvalidWeights
                | Error::NotNegativeDefinite(_)
                | Error::MuTooSmall { .. }
                | Error::InconsistentSpec(_)
                | Error::IndexError { .. }
                | Error::TooLarge(_)
                | Error::Io { .. }
                | Error::Parse(_)
        )
    }
}
