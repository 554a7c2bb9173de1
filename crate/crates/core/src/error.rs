use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solvers and the scenario loader.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read or write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed scenario file. `line`/`column` come from the JSON parser.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A value parsed fine but violates a domain invariant.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The UAV sits (numerically) on top of a radiating element.
    #[error("degenerate geometry: UAV within {distance_m:e} m of antenna {antenna}")]
    DegenerateGeometry { antenna: usize, distance_m: f64 },

    /// No activation can satisfy the rate threshold in this slot.
    #[error("infeasible slot {slot}: effective gain is zero")]
    InfeasibleSlot { slot: usize },

    #[error("problem too large for exact solver: {what} = {got} exceeds limit {limit}")]
    SizeGuard {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
