use thiserror::Error;

/// Errors produced by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("root order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("not Hadamard: rows {0} and {1} are not orthogonal")]
    NotHadamard(usize, usize),

    #[error("construction failed validation at block ({0}, {1})")]
    BlockViolation(usize, usize),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid switch plan: {0}")]
    InvalidPlan(String),

    #[error("switching condition violated: {0}")]
    Condition(String),

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("cost cap exceeded: {0}")]
    CapExceeded(String),

    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(u64),

    #[error("store: {0}")]
    Store(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
