use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: row {row}, col {col}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        col: usize,
        message: String,
    },

    #[error("degenerate ensemble: {0}")]
    DegenerateEnsemble(String),

    #[error("support violation: q(m) = 0 where p(m) = {0}")]
    Support(f64),

    #[error("location ({row}, {col}) has already been measured")]
    DuplicateMeasurement { row: usize, col: usize },

    #[error("every pixel of the map has been measured")]
    MapComplete,

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("ground truth mismatch: {0}")]
    GroundTruthMismatch(String),

    #[error("ground truth error: {0}")]
    GroundTruth(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("image output failed: {0}")]
    Render(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Parse { .. } | Error::GroundTruth(_) | Error::GroundTruthMismatch(_) => 3,
            _ => 2,
        }
    }
}
