use std::fmt;

use thiserror::Error;

/// Process exit status for each failure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Config = 1,
    Numeric = 2,
    Io = 3,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Config(_) => ExitStatus::Config,
            CliError::Numeric(_) => ExitStatus::Numeric,
            CliError::Io(_) => ExitStatus::Io,
        }
    }

    pub fn config(msg: impl fmt::Display) -> Self {
        CliError::Config(msg.to_string())
    }
}

impl From<magnonq_core::Error> for CliError {
    fn from(e: magnonq_core::Error) -> Self {
        use magnonq_core::Error as E;
        match e {
            E::NotHermitian(_) | E::NotPositive(_) | E::NoInteriorMaximum(..) => {
                CliError::Numeric(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
