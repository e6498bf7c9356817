//! Exit codes and the one-line error report.

use std::fmt;

use omring_core::Error;
use serde::Serialize;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_UNSTABLE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            kind: "config",
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            kind: "io",
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            kind: "numerical",
            message: message.into(),
        }
    }

    /// Single-line JSON object for the error stream.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("error report serializes")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind, self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (code, kind) = match e {
            Error::InvalidParameter { .. } => (EXIT_CONFIG, "config"),
            Error::Unstable { .. } | Error::Diverged { .. } => (EXIT_UNSTABLE, "unstable"),
            _ => (EXIT_NUMERICAL, "numerical"),
        };
        Self {
            code,
            kind,
            message: e.to_string(),
        }
    }
}
