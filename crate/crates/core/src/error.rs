use thiserror::Error;

/// Failure kinds shared by every module.
///
/// The CLI maps these onto exit codes: validation-style errors exit with 1,
/// computation failures with 2 and resource caps with 3.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("computation failed: {0}")]
    Computation(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Argument(_) => "argument",
            Error::Validation(_) => "validation",
            Error::Precondition(_) => "precondition",
            Error::Computation(_) => "computation",
            Error::Resource(_) => "resource",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
