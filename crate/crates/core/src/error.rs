use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    /// A testing graph mentions a relation the training vocabulary does not know.
    #[error("{source_name}:{line}: relation `{name}` is not part of the training vocabulary")]
    InductiveContract {
        source_name: String,
        line: usize,
        name: String,
    },

    #[error("triple {index} references {what} id {id}, vocabulary holds {size}")]
    OutOfVocabulary {
        index: usize,
        what: &'static str,
        id: u32,
        size: usize,
    },

    #[error("unknown entity {0}")]
    UnknownEntity(String),

    #[error("unknown relation {0}")]
    UnknownRelation(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{source_name}:{line}: decode error: {message}")]
    Decode {
        source_name: String,
        line: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
