use std::path::PathBuf;

use crate::config::ConfigError;

/// Process exit statuses.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const INSUFFICIENT_DATA: i32 = 3;
    pub const QUADRATURE: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] cone_yaglom_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("json: {0}")]
    Json(#[source] serde_json::Error),
    #[error("golden file {path}: {reason}")]
    Golden { path: String, reason: String },
    #[error("worker pool: {0}")]
    Pool(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use cone_yaglom_core::Error as E;
        match self {
            CliError::Config(_) => exit_code::VALIDATION,
            CliError::Core(e) => match e {
                E::Domain(_) | E::Invalid { .. } | E::DimensionMismatch { .. } | E::Unsupported(_) => exit_code::VALIDATION,
                E::InsufficientData(_) => exit_code::INSUFFICIENT_DATA,
                E::Quadrature { .. } => exit_code::QUADRATURE,
                _ => exit_code::OTHER,
            },
            _ => exit_code::OTHER,
        }
    }
}
