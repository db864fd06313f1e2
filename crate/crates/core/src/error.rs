use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (relative deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace {trace} deviates from 1 by more than the renormalization tolerance")]
    NotUnitTrace { trace: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation requires total dimension {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("spectrum length {found} does not match dimension {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("spectrum is not (1/2, 1/2, 0, 0) within tolerance (max deviation {deviation:.3e})")]
    SpectrumMismatch { deviation: f64 },

    #[error("state is the maximally mixed state; the normalized gap mixture is undefined")]
    DegenerateTau,

    #[error("no exact separability oracle for total dimension {dim}")]
    OracleUnavailable { dim: usize },

    #[error("rejection sampling gave up after {draws} draws")]
    RejectionTimeout { draws: u64 },

    #[error("eigendecomposition did not converge")]
    NoConvergence,

    #[error("malformed input at {location}: {message}")]
    MalformedInput { location: String, message: String },

    #[error("validation failed: {0}")]
    ValidationFailure(Box<Error>),
}

impl Error {
    /// Stable snake_case name of the variant, used in machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonSquare { .. } => "non_square",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NotPsd { .. } => "not_psd",
            Error::NotUnitTrace { .. } => "not_unit_trace",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::WrongDimension { .. } => "wrong_dimension",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::InvalidSpectrum(_) => "invalid_spectrum",
            Error::Domain(_) => "domain",
            Error::SpectrumMismatch { .. } => "spectrum_mismatch",
            Error::DegenerateTau => "degenerate_tau",
            Error::OracleUnavailable { .. } => "oracle_unavailable",
            Error::RejectionTimeout { .. } => "rejection_timeout",
            Error::NoConvergence => "no_convergence",
            Error::MalformedInput { .. } => "malformed_input",
            Error::ValidationFailure(_) => "validation_failure",
        }
    }
}
