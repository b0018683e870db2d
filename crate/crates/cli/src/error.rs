use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// Syntax error in a scenario file, with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub field: Option<String>,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, field: Option<&str>, message: impl Into<String>) -> Self {
        ParseError {
            line,
            field: field.map(str::to_owned),
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.field {
            Some(field) => write!(f, "line {}: {}: {}", self.line, field, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("scenario `{scenario}` is invalid: {source}")]
    Invalid {
        scenario: String,
        #[source]
        source: lieobs::Error,
    },
    #[error("unknown builtin or missing file `{0}`")]
    UnknownTarget(String),
    #[error("unknown verify selector `{0}`")]
    UnknownSelector(String),
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed manifest: {source}")]
    Manifest {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for bad input, 4 for file-system or data problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_)
            | CliError::Invalid { .. }
            | CliError::UnknownTarget(_)
            | CliError::UnknownSelector(_) => 2,
            CliError::MissingData(_) | CliError::Io { .. } | CliError::Manifest { .. } => 4,
        }
    }
}
