use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Core {
        path: PathBuf,
        #[source]
        source: structforge::Error,
    },

    #[error(transparent)]
    Pipeline(#[from] structforge::Error),

    #[error("{failed} of {total} inputs failed")]
    Batch { failed: usize, total: usize },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn core(path: &Path, source: structforge::Error) -> Self {
        CliError::Core {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Short stable tag used in the `error[...]` prefix.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Core { source, .. } | CliError::Pipeline(source) => match source {
                structforge::Error::Xml { .. } => "xml",
                structforge::Error::Validation { .. } => "validation",
                structforge::Error::EmptyStructure => "empty",
                structforge::Error::Capacity { .. } => "capacity",
                structforge::Error::Params(_) => "params",
                structforge::Error::Adjustment { .. } => "adjustment",
                structforge::Error::Format(_) => "format",
                structforge::Error::Io(_) => "io",
            },
            CliError::Batch { .. } => "batch",
        }
    }

    /// The single line printed on stderr for this error.
    pub fn line(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!("error[{}]: {msg}", self.kind())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
