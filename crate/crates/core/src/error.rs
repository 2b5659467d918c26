//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

use crate::spectral::Representation;
use crate::state::FlowState;

/// Errors produced by grid construction, field algebra, stepping and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size must be an even integer >= 8, got {0}")]
    GridSize(usize),

    #[error("expected a field in {expected:?} representation, found {found:?}")]
    Representation {
        expected: Representation,
        found: Representation,
    },

    #[error("fields live on incompatible grids ({0}x{0} vs {1}x{1})")]
    GridMismatch(usize, usize),

    #[error("data shape {rows}x{cols} does not match grid {n}x{n}")]
    DataShape { rows: usize, cols: usize, n: usize },

    #[error("temperature positivity violated (min value {min:.6e})")]
    Positivity { min: f64 },

    #[error("conductivity evaluated at negative argument {0:.6e}")]
    NegativeTemperature(f64),

    #[error("invalid material law: {0}")]
    Material(String),

    #[error(
        "time step rejected at t = {t}: min theta {min_theta:.6e} stayed at or below the \
         floor after {halvings} halvings"
    )]
    StepFailed {
        t: f64,
        min_theta: f64,
        halvings: u32,
        /// State at the time of failure, for post-mortem inspection.
        state: Box<FlowState>,
    },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid snapshot: {0}")]
    SnapshotFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
