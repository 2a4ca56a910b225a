use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error("grid inference failed for {path}: {msg}")]
    GridInference { path: PathBuf, msg: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("output error: {0}")]
    Output(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error(transparent)]
    Core(#[from] vortigen::Error),
}

impl CliError {
    pub fn parse(path: &Path, msg: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.to_path_buf(),
            msg: msg.into(),
        }
    }

    pub fn grid(path: &Path, msg: impl Into<String>) -> Self {
        CliError::GridInference {
            path: path.to_path_buf(),
            msg: msg.into(),
        }
    }

    pub fn read(path: &Path, source: std::io::Error) -> Self {
        CliError::Read {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn write(path: &Path, source: std::io::Error) -> Self {
        CliError::Write {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2 for bad input, 3 for numerical failure.
    pub fn exit_code(&self) -> u8 {
        use vortigen::Error as E;
        match self {
            CliError::Parse { .. } | CliError::GridInference { .. } | CliError::Config(_) | CliError::Read { .. } => 2,
            CliError::Write { .. } | CliError::Output(_) | CliError::CheckFailed(_) => 3,
            CliError::Core(e) => match e {
                E::StagnationAtSeed { .. }
                | E::DegenerateTrajectory(_)
                | E::TooCloseToBoundary(_)
                | E::NonConvergence { .. } => 3,
                _ => 2,
            },
        }
    }
}
