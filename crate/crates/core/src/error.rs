use thiserror::Error;

use crate::oracle::ModeVerification;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The (0,0) Fourier mode was supplied where it is excluded.
    #[error("the (0,0) mode is not an admissible variation")]
    ZeroMode,

    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),

    #[error("unsupported base metric: {0}")]
    UnsupportedMetric(String),

    #[error("tensor is not trace-free (max |t11 + t22| coefficient = {0:e})")]
    NotTraceFree(f64),

    /// A Poisson right-hand side with a nonzero constant mode.
    #[error("right-hand side has nonzero mean {0:e}; no periodic solution")]
    NonzeroMean(f64),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    /// Coordinate degeneration of a surface of revolution.
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("constraint correction failed: {0}")]
    Correction(String),

    #[error("verification failed: {}", .0.failures.join("; "))]
    VerificationFailed(Box<ModeVerification>),
}
