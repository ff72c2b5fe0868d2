use std::path::PathBuf;

use thiserror::Error;

use crate::geometry::Point;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point} lies outside the domain")]
    OutsideDomain { point: Point },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("degenerate exponent: value {value} at {point} is not > 1")]
    DegenerateExponent { value: f64, point: Point },

    #[error(
        "inadmissible exponent: reciprocal {reciprocal} at node {node} ({point}) is not positive"
    )]
    InadmissibleExponent {
        node: usize,
        point: Point,
        reciprocal: f64,
    },

    #[error("grid function belongs to a different grid")]
    GridMismatch,

    #[error("norm computation did not converge after {iterations} iterations (bracket [{lo}, {hi}], modular {modular})")]
    NoConvergence {
        iterations: usize,
        lo: f64,
        hi: f64,
        modular: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
