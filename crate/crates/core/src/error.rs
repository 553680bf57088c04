use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error(
        "series did not converge within {terms} terms at tau = {tau}; \
         for tau this small use the q = 0 (LOE) closed form or raise max_terms"
    )]
    Truncation { tau: f64, terms: usize },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("numerical consistency fault: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
