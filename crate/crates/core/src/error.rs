use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid strategy `{spec}`: {reason}")]
    InvalidStrategy { spec: String, reason: String },

    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),

    #[error("chain has {states} joint states, exceeding the cap of {cap}; raise the cap or use smaller strategies")]
    StateSpaceTooLarge { states: usize, cap: usize },

    #[error("chain is reducible ({closed_classes} closed classes); the stationary distribution is not unique")]
    Reducible { closed_classes: usize },

    #[error("stationary solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("mean fitness {0} is not positive; shift payoffs so every entry is positive")]
    NonPositiveFitness(f64),

    #[error("payoff computation failed for `{row}` vs `{col}`: {source}")]
    Pair {
        row: String,
        col: String,
        #[source]
        source: Box<Error>,
    },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("i/o error on {path}: {source}")]
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
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn strategy(spec: &str, reason: impl Into<String>) -> Self {
        Error::InvalidStrategy {
            spec: spec.to_string(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by a computation outgrowing its limits.
    pub fn is_resource(&self) -> bool {
        match self {
            Error::StateSpaceTooLarge { .. } | Error::NotConverged { .. } => true,
            Error::Pair { source, .. } => source.is_resource(),
            _ => false,
        }
    }
}
