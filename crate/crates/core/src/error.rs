use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point is undefined for this operation: {0}")]
    OutOfDomain(String),

    #[error("index {index} out of range for space of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("not a metric: {0}")]
    NotAMetric(String),

    #[error("budget exceeded: {what} would need {needed}, limit is {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: usize,
        limit: usize,
    },

    #[error("z/2 action is not free: simplex {0:?} is fixed")]
    FixedSimplex(Vec<usize>),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
