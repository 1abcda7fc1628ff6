use std::path::PathBuf;

use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("log-density {0} lies outside the equation-of-state interval [-1, 1]")]
    EosDomain(f64),

    #[error("invalid equation of state: {0}")]
    InvalidEos(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("missing required configuration keys: {}", .0.join(", "))]
    MissingKeys(Vec<String>),

    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("left the near-constant regime at t = {t}: {reason}")]
    RegimeExit { t: f64, reason: String },

    #[error("non-finite value in field `{0}`")]
    NonFinite(&'static str),

    #[error("no compressive characteristics; the crossing time is unbounded")]
    NoShock,

    #[error("not ready: {0}")]
    NotReady(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error("json encoding failed: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
