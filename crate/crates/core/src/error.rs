use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: wrong dimensions, out-of-range parameters, non-Hermitian matrices.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    PsdViolation { min_eigenvalue: f64 },

    #[error("resource limit exceeded: {what} = {requested} > {limit}")]
    ResourceLimit {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    /// A formula was evaluated outside the parameter region it is defined on.
    #[error("domain error: {0}")]
    Domain(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
