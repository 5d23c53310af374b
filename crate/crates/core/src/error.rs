use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Failure of a single oracle query.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("inner solver exhausted its budget of {budget} iterations (best gap bound {best_gap:e})")]
    BudgetExhausted { budget: usize, best_gap: f64 },
    #[error("oracle produced a non-finite value")]
    NonFinite,
    #[error("oracle dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
