use std::path::PathBuf;

use crate::config::Origin;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{origin}: {message}")]
    Config { origin: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Circuit {
        path: PathBuf,
        #[source]
        source: qnoc_core::Error,
    },
    #[error("{point}: {source}")]
    Run {
        point: String,
        #[source]
        source: qnoc_core::Error,
    },
    #[error("schema error in {path}: {message}")]
    Schema { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] qnoc_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn config(origin: &Origin, message: impl Into<String>) -> Self {
        CliError::Config {
            origin: origin.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
