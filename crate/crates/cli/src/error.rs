use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("i/o on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("falsified: {0}")]
    Falsified(String),
    #[error(transparent)]
    Core(#[from] outlierlab::Error),
}

impl CliError {
    /// 2 for falsification, 3 for configuration and I/O problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Falsified(_) | CliError::Core(outlierlab::Error::Falsified(_)) => 2,
            _ => 3,
        }
    }
}

pub fn read_file(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn write_file(path: &std::path::Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}
