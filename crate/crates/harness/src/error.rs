use std::path::PathBuf;

use thiserror::Error;
use uncoded_secrecy::adversary::AttackError;
use uncoded_secrecy::models::ModelError;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Invalid configuration; `path` names the offending field.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error(transparent)]
    Core(#[from] uncoded_secrecy::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<ModelError> for HarnessError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InvalidField { field, reason } => HarnessError::Config {
                path: field,
                message: reason,
            },
            other => HarnessError::Core(other.into()),
        }
    }
}

impl From<uncoded_secrecy::permute::SchemeError> for HarnessError {
    fn from(e: uncoded_secrecy::permute::SchemeError) -> Self {
        match e {
            uncoded_secrecy::permute::SchemeError::Model(m) => m.into(),
            other => HarnessError::Core(other.into()),
        }
    }
}

macro_rules! via_core {
    ($($t:ty),*) => {
        $(impl From<$t> for HarnessError {
            fn from(e: $t) -> Self {
                HarnessError::Core(e.into())
            }
        })*
    };
}

via_core!(
    uncoded_secrecy::codebook::CodebookError,
    uncoded_secrecy::permute::TypeError,
    uncoded_secrecy::rd::RdError,
    uncoded_secrecy::regions::RegionError
);
