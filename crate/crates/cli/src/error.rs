use std::fmt;

use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    Config { key: Option<String>, message: String },
    Solver(hodowave::WaveError),
    /// The verification report's overall verdict is fail.
    Verification(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Solver(_) => 3,
            CliError::Verification(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config",
            CliError::Solver(_) => "solver",
            CliError::Verification(_) => "verification",
            CliError::Io(_) => "io",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { key: Some(k), message } => write!(f, "config error ({k}): {message}"),
            CliError::Config { key: None, message } => write!(f, "config error: {message}"),
            CliError::Solver(e) => write!(f, "solver failure: {e}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<hodowave::WaveError> for CliError {
    fn from(e: hodowave::WaveError) -> Self {
        CliError::Solver(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Body of error.json.
#[derive(Serialize)]
pub struct ErrorRecord<'a> {
    pub kind: &'a str,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key: Option<&'a str>,
    pub message: String,
}

impl<'a> From<&'a CliError> for ErrorRecord<'a> {
    fn from(e: &'a CliError) -> Self {
        ErrorRecord {
            kind: e.kind(),
            exit_code: e.exit_code(),
            key: match e {
                CliError::Config { key, .. } => key.as_deref(),
                _ => None,
            },
            message: e.to_string(),
        }
    }
}
