use thiserror::Error;

/// Errors raised by the simulator and its analytic routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index out of range: {what} = {index} (limit {limit})")]
    Index {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("degenerate combiner weight: {0}")]
    DegenerateWeight(String),

    #[error("singular diagonal model: {0}")]
    Singular(String),

    #[error("insufficient samples: {0}")]
    Precision(String),

    #[error("numeric failure in rule {rule} at trial {trial}: {detail}")]
    Numeric {
        rule: String,
        trial: u64,
        detail: String,
    },

    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema { .. } | Error::Config(_) | Error::Unsupported(_) => 2,
            Error::Numeric { .. } => 3,
            _ => 1,
        }
    }
}
