use thiserror::Error;

/// Errors produced by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{origin}:{line}: {msg}")]
    Parse {
        origin: String,
        line: usize,
        msg: String,
    },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("move `{mv}` does not apply: {reason}")]
    InvalidMove { mv: String, reason: String },
    #[error("conditions violated: {0}")]
    Conditions(String),
    #[error("invalid gluing data: {0}")]
    Gluing(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid potential: {0}")]
    Potential(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(origin: &str, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            origin: origin.to_string(),
            line,
            msg: msg.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) => 2,
            Error::Unsupported(_) | Error::Conditions(_) => 3,
            _ => 1,
        }
    }
}
