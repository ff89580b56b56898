use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{message}, line {line}")]
    Corpus { line: usize, message: String },

    #[error("unknown label \"{0}\"")]
    UnknownLabel(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value in {component}")]
    NonFinite { component: String },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("missing artifact {artifact}; produce it with `{produced_by}`")]
    MissingArtifact { artifact: String, produced_by: String },

    #[error("{0}")]
    Other(String),
}

impl Error {
    pub fn corpus(line: usize, message: impl Into<String>) -> Self {
        Error::Corpus {
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
