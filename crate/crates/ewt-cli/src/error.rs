//! CLI error classes mapped to exit codes: 2 usage, 3 data/format,
//! 4 numerical (detection or solver failure).

use std::fmt;

use ewt_core::EwtError;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad arguments or parameter combinations (exit code 2).
    Usage(String),
    /// File, format or IO problems (exit code 3).
    Data(String),
    /// Detection or solver failures (exit code 4).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Data(_) => "data",
            CliError::Numerical(_) => "numerical",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numerical(m) => m,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}

impl From<EwtError> for CliError {
    fn from(e: EwtError) -> Self {
        match e {
            EwtError::InvalidArgument(msg) => CliError::Usage(msg),
            EwtError::Detection(msg) => CliError::Numerical(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
