use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("invalid config at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: msg.into(),
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
