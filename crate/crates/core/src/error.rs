use std::path::PathBuf;

/// Errors raised across the workbench.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("training failed: {0}")]
    Training(String),

    #[error("cross-validation planning failed: {0}")]
    Planning(String),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by bad input rather than a runtime failure.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Training(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
