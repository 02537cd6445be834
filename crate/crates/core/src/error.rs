use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error classes, used by the command line to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Input,
    Infeasible,
    Training,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: missing required column `{column}`")]
    Schema { path: PathBuf, column: String },

    #[error("{0}: no valid rows")]
    EmptyInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("gap of {bins} half-hour bins between {from} and {to} exceeds the interpolation limit")]
    Gap { from: String, to: String, bins: usize },

    #[error("vapour pressure {vapour_hpa:.3} hPa reaches total pressure {total_hpa:.3} hPa")]
    SaturationOverflow { vapour_hpa: f64, total_hpa: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("time span mismatch: {0}")]
    SpanMismatch(String),

    #[error("feature set {0} needs a cluster model")]
    MissingClusterModel(String),

    #[error("least-squares system is rank deficient: {0}")]
    RankDeficient(String),

    #[error("invalid part load ratio {plr} for chiller {chiller}")]
    InvalidPlr { chiller: String, plr: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("storage state of charge not cyclic: start {start_kwh:.3} kWh, end {end_kwh:.3} kWh")]
    Cyclicity { start_kwh: f64, end_kwh: f64 },

    #[error("training failed: {0}")]
    Training(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidConfig(_) => ErrorKind::Config,
            Error::InvalidPlr { .. } | Error::Infeasible(_) | Error::Cyclicity { .. } => {
                ErrorKind::Infeasible
            }
            Error::Training(_) => ErrorKind::Training,
            _ => ErrorKind::Input,
        }
    }
}
