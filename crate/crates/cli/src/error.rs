use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input, bad arguments.
    #[error("{0}")]
    Input(String),
    /// The solver or preparation pipeline failed.
    #[error("{0}")]
    Solver(String),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
}

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
/// A limit stopped the run before its target; partial results were written.
pub const EXIT_LIMIT: u8 = 4;

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Self::Input(_) => EXIT_INPUT,
            Self::Solver(_) | Self::Output { .. } => EXIT_SOLVER,
        })
    }
}

pub fn write_file(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Output { path: path.display().to_string(), source })
}

pub fn read_file(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn create_dir(path: &std::path::Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|source| CliError::Output { path: path.display().to_string(), source })
}
