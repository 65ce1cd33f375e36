use thiserror::Error;

/// Errors raised by group construction, parsing and the classification engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Bad user input: out-of-range element indices, malformed tuples and so on.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unsupported construct: {0}")]
    Unsupported(String),

    /// A computation would exceed a configured size bound.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Constructed data failed a structural check (non-automorphic action, order mismatch, ...).
    #[error("validation failed: {0}")]
    Validation(String),

    /// A caller broke an operation's precondition, e.g. quotient by a non-normal subgroup.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("inconsistent configuration: {0}")]
    Inconsistent(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("malformed group file (line {line}): {msg}")]
    GroupFile { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
