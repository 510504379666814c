use std::fmt;
use std::path::Path;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// Unparseable or inconsistent configuration, bad usage.
    pub const CONFIG: i32 = 1;
    /// A graph assumption does not hold.
    pub const ASSUMPTION: i32 = 2;
    /// Formation infeasible, or no admissible gains.
    pub const INFEASIBLE: i32 = 3;
    /// Reading or writing a file failed.
    pub const IO: i32 = 4;
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Assumption(String),
    Infeasible(String),
    Io(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn assumption(e: impl fmt::Display) -> Self {
        CliError::Assumption(e.to_string())
    }

    pub fn synthesis(e: impl fmt::Display) -> Self {
        CliError::Infeasible(e.to_string())
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Assumption(_) => exit::ASSUMPTION,
            CliError::Infeasible(_) => exit::INFEASIBLE,
            CliError::Io(_) => exit::IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Assumption(m) => write!(f, "graph assumption failed: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
