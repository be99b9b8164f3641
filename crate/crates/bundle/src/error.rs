use segre_core::{AlgebraError, SeriesError};
use segre_grid::GridError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BundleError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("metric is degenerate at {0}; a positive ε is required")]
    Degenerate(String),
    #[error("form of bidegree {found} where {expected} was expected")]
    BidegreeMismatch { expected: usize, found: usize },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Unsupported(String),
}
