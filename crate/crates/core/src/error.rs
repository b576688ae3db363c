use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input has the wrong shape (non-square matrix, length mismatch, ...).
    #[error("structural error: {0}")]
    Structure(String),
    /// Input contains values outside the admissible domain.
    #[error("value error: {0}")]
    Value(String),
    /// A semimetric or measure invariant is violated.
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// The instance is larger than an exact routine is allowed to handle.
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),
    /// A search ran out of its node or iteration budget.
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    /// A system descriptor does not define a valid system.
    #[error("construction error: {0}")]
    Construction(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by size caps or exhausted budgets.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded(_) | Error::Budget(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
