use thiserror::Error;

/// Errors shared by every module of the crate.
///
/// The variants map onto the CLI exit codes: `Domain` is bad input (2),
/// `Resource` is a configured cap (3), everything else is a numeric
/// failure (1).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Flow(#[from] crate::flow::FlowError),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// Process exit code associated with this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Parse(_) => 2,
            Error::Resource(_) => 3,
            Error::Numeric(_) | Error::Flow(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
