use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("not a density matrix: {0}")]
    InvalidDensity(String),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("coefficients are not normalized (|a|^2 + |b|^2 = {0})")]
    CoefficientNorm(f64),

    #[error("Kraus operators do not satisfy completeness (max deviation {0:e})")]
    Completeness(f64),

    #[error("matrix is not an isometry (max deviation {0:e})")]
    NotIsometry(f64),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("fixture {name}: printed squared norm {norm_sq} deviates from 1 by more than 1e-3")]
    FixtureNorm { name: &'static str, norm_sq: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
