use thiserror::Error;

use crate::splitter::ConstraintReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("splitter violates its constraints:\n{0}")]
    InvalidSplitter(ConstraintReport),

    #[error("|rho|^2 + |tau|^2 = {norm} is not 1 within {tol:e}")]
    NotUnitNorm { norm: f64, tol: f64 },

    #[error("{total} photons exceed the configured maximum of {max}")]
    PhotonLimit { total: u64, max: u64 },

    #[error(
        "amplitude sum for ({n1}, {n2}) cancels beyond working precision \
         (estimated absolute error {bound:e})"
    )]
    PrecisionExhausted { n1: u32, n2: u32, bound: f64 },

    #[error("truncation at {n_max} photons is inadequate for |gamma|^2 = {mean}")]
    InadequateTruncation { mean: f64, n_max: u32 },

    #[error("state norm^2 = {norm_sqr} is not normalized")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
