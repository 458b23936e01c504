use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::labels::LabelKey;

pub type IoResult<T> = Result<T, IoError>;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}: no valid rows")]
    EmptyRecording { path: PathBuf },
    #[error("{path}: duplicate label for {key}")]
    DuplicateLabel { path: PathBuf, key: LabelKey },
    #[error("{path}: {source}")]
    Core {
        path: PathBuf,
        #[source]
        source: iutq_core::Error,
    },
}

impl IoError {
    pub(crate) fn file(path: impl Into<PathBuf>, source: io::Error) -> Self {
        IoError::File { path: path.into(), source }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        IoError::Format { path: path.into(), message: message.into() }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, e: csv::Error) -> Self {
        let path = path.into();
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(source) => IoError::File { path, source },
                _ => unreachable!(),
            }
        } else {
            IoError::Format { path, message: e.to_string() }
        }
    }
}
