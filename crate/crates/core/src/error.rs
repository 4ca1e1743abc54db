use std::path::PathBuf;

/// Errors produced by the simulator and schedulers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration field `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("transmit power overflow: rate/bandwidth ratio {ratio} exceeds {limit}")]
    Overflow { ratio: f64, limit: f64 },

    #[error("round {round}: {source}")]
    Round {
        round: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("malformed dataset file: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config { field, reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors caused by bad user configuration rather than runtime failure.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config { .. } => true,
            Error::Round { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
