use thiserror::Error;

/// Failures of a command, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] potts_tisgm::Error),

    #[error("{0}")]
    Usage(String),

    #[error("cannot create {}: {source}", path.display())]
    Create {
        path: std::path::PathBuf,
        source: std::io::Error,
    },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    /// 2 for anything wrong with the request, 3 for output failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) | CliError::Usage(_) => 2,
            CliError::Create { .. } | CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) | CliError::Pool(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
