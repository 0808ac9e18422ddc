use thiserror::Error;

/// Errors raised by the solver, bound engine and verifiers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid instance: {}", .0.join("; "))]
    InvalidInstance(Vec<String>),

    #[error("instance has {0} senders; the single-sender solver needs exactly one")]
    NotSingleSender(usize),

    #[error("multi-sender operations need binary messages, but message {message} has {bits} bits")]
    NonBinary { message: usize, bits: u32 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed code: {0}")]
    MalformedCode(String),

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
