use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dyadic index {j} outside -1..={j_max}")]
    BlockOutOfRange { j: i32, j_max: i32 },

    #[error("CFL violation: max|u|*dt/dx = {cfl:.4} exceeds {limit}")]
    Cfl { cfl: f64, limit: f64 },

    #[error("density left admissible range [{lo:.6}, {hi:.6}]: observed [{min:.6}, {max:.6}]")]
    DensityBounds { lo: f64, hi: f64, min: f64, max: f64 },

    #[error("pressure iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("not enough samples in fit window: need {need}, got {got}")]
    InsufficientSamples { need: usize, got: usize },

    #[error("nonpositive value {value} at t = {t} in decay series")]
    NonPositive { t: f64, value: f64 },

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("config: {0}")]
    Config(String),

    #[error("missing run artifact: {0}")]
    MissingArtifact(PathBuf),

    #[error("trajectory carries no spectral snapshots")]
    MissingSnapshots,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
