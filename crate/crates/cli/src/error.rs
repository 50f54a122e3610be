use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Everything that can stop a command. [`CliError::exit_code`] maps each
/// variant onto the process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// The library rejected an input built from the command line.
    #[error("invalid input: {0}")]
    Input(#[source] optiphase_core::Error),
    #[error("numerical failure: {0}")]
    Numerical(#[source] optiphase_core::Error),
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot parse {}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("write failed: {0}")]
    Write(#[from] io::Error),
    #[error("write failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("write failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0} oracle cross-check(s) failed")]
    ChecksFailed(usize),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    /// 2 for anything the user can fix by changing the arguments or input
    /// files, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) | CliError::Read { .. } | CliError::Parse { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
