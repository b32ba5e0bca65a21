use thiserror::Error;

use crate::design::ValidationErrors;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not converge: estimated error {error_estimate:.3e} after {subdivisions} subdivisions")]
    Quadrature {
        estimate: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    /// The log-rank variance is zero, so the statistic is undefined.
    #[error("log-rank statistic undefined: {0}")]
    UndefinedStatistic(String),

    #[error(transparent)]
    Validation(#[from] ValidationErrors),
}
