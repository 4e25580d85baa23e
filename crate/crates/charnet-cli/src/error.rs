//! Process-level error classification.
//!
//! Everything a command can fail with collapses into two classes that fix
//! the exit code: input errors (unreadable or malformed files, exit 1) and
//! configuration errors (contradictory or invalid settings, exit 2).
//! Messages for input errors always name the offending file; parser errors
//! carry their own line numbers.

use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub enum CliError {
    /// A file could not be read or did not parse. Exit code 1.
    Input(String),
    /// Flags or config values conflict or fail validation. Exit code 2.
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Config(_) => 2,
        }
    }

    /// Input error attributed to a file.
    pub fn input(path: &Path, err: impl fmt::Display) -> Self {
        CliError::Input(format!("{}: {err}", path.display()))
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Config(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}
