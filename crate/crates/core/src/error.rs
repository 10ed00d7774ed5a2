use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad configuration value. `key` names the offending config key or argument.
    #[error("config error at `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("x = {x} is outside the tabulated domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },

    #[error("index error: {0}")]
    Index(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("singular matrix: rank {rank} < {dim}")]
    Singular { rank: usize, dim: usize },

    /// Phase average of binary observations hit 0 or 1, so the CDF cannot be inverted.
    #[error("cannot invert CDF for phase {phase}: empirical frequency {frequency}")]
    Inversion { phase: usize, frequency: f64 },

    #[error("density lower bound is zero; adaptive step-size coefficient is unbounded")]
    RateDegenerate,

    #[error("non-finite estimate at step k = {k}")]
    NumericalFault { k: usize },

    #[error("replication {run} (noise seed {seed:#018x}) failed: {source}")]
    Ensemble {
        run: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("statistics error: {0}")]
    Statistics(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad input rather than by numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::Index(_) | Error::Shape(_)
        )
    }
}
