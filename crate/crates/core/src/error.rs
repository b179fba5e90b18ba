use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient samples: signal shorter than one window ({have} < {need})")]
    InsufficientSamples { have: usize, need: usize },

    #[error("window/hop pair does not satisfy overlap-add reconstruction")]
    NonCola,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("checkpoint corrupt: {0}")]
    Checkpoint(String),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
