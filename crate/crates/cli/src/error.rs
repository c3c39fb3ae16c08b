use std::fmt;

use contraforge::Error;

/// A failed run and the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

pub const USAGE: u8 = 2;
pub const BACKEND: u8 = 3;
pub const VALIDATION: u8 = 4;

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: USAGE, message: message.into() }
    }

    pub fn backend(message: impl Into<String>) -> Self {
        CliError { code: BACKEND, message: message.into() }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        CliError { code: VALIDATION, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Config(_) | Error::Io { .. } => USAGE,
            Error::Backend { .. } | Error::Protocol { .. } => BACKEND,
            _ => VALIDATION,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Error::from(e).into()
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;
