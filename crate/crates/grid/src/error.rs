use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("chart too small: {0}")]
    ChartTooSmall(String),
    #[error("{count} non-finite samples (first at node {first})")]
    NonFinite { count: usize, first: usize },
    #[error("fields live on different charts")]
    IncompatibleCharts,
    #[error("bidegree {0} exceeds the dimension {1}")]
    BidegreeOverflow(usize, usize),
    #[error("epsilon schedule must be strictly decreasing and positive")]
    NonMonotoneSchedule,
    #[error("monotonicity violated at {nodes} nodes after {doublings} doublings of A")]
    MonotonicityViolation { nodes: usize, doublings: u32 },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
