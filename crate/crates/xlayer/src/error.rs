//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNotConverged { achieved: f64, requested: f64 },

    #[error("characteristic function decays too slowly: tail bound {bound:.3e} at omega {omega:.3e}")]
    SlowCfDecay { bound: f64, omega: f64 },

    #[error("probability {value} lies outside [0, 1] beyond numerical tolerance")]
    ProbabilityOutOfRange { value: f64 },

    #[error("rank {rank} out of range for {count} points")]
    RankOutOfRange { rank: usize, count: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
