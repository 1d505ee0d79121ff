use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("labels must contain at least one +1 and one -1")]
    SingleClass,

    #[error("matrix is not positive definite ({0}); use a regularization eps > 0")]
    NotPositiveDefinite(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("zero-length axis")]
    ZeroAxis,

    #[error("infeasible multipliers: {0}")]
    Infeasible(String),

    #[error("empty extreme-point set")]
    NoExtremePoints,

    #[error("{0}")]
    Parse(String),

    #[error("missing field `{0}` in document")]
    MissingField(String),

    #[error("unsupported document version {found} (expected {expected})")]
    Version { found: u64, expected: u64 },

    #[error("file not found: {0}")]
    FileNotFound(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("pair ({first}, {second}): {source}")]
    Pair {
        first: String,
        second: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path.display().to_string())
        } else {
            Error::Io {
                path: path.display().to_string(),
                source,
            }
        }
    }

    /// True for errors caused by the filesystem rather than by content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::FileNotFound(_) | Error::Io { .. })
    }
}
