use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max deviation of U^dag U from identity {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("{function} is undefined at eigenvalue {eigenvalue:e}")]
    Domain { function: String, eigenvalue: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("scheme is not a valid POVM: {0}")]
    SchemeInvalid(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("insufficient precision: {0}")]
    Precision(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
