use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested problem exceeds the size guard.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// An iterative or spectral routine failed to reach its tolerance.
    #[error("numerical failure: {message} (best residual {residual:e})")]
    Numerical { message: String, residual: f64 },

    /// The ground state is degenerate across magnetization sectors, so
    /// expectation values depend on an arbitrary choice of state.
    #[error("ambiguous ground state: {0}")]
    Ambiguous(String),

    /// Correlators or energy data that cannot come from a physical state.
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn inconsistent(msg: impl Into<String>) -> Self {
        Error::Inconsistent(msg.into())
    }
}
