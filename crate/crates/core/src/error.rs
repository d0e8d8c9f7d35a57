use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("{inner} is not obtained from {outer} by removing one or two boxes")]
    NotRelated { outer: String, inner: String },
    #[error("the empty diagram has no removable box")]
    EmptyDiagram,
    #[error("string is not a bijection on the alphabet: {0:?}")]
    NotInjective(Vec<usize>),
    #[error("{what} supports N in [{min}, {max}], got {n}")]
    Capacity {
        what: &'static str,
        min: usize,
        max: usize,
        n: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("factors do not commute (residual {0:e})")]
    NonCommuting(f64),
    #[error("symmetry violated: {0}")]
    Symmetry(String),
    #[error("eigensolver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("coefficient key outside the availability table: {0}")]
    UnavailableKey(String),
    #[error("coefficient table is zero")]
    ZeroTable,
    #[error("unknown check: {0}")]
    UnknownCheck(String),
    #[error("evaluation budget exhausted before any evaluation")]
    BudgetExhausted,
    #[error("malformed matrix file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
