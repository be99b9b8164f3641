use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("variable mismatch: {0}")]
    VariableMismatch(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-proper intersection: {0}")]
    NonProperIntersection(String),
    #[error("unsupported exact case: {0}")]
    UnsupportedExactCase(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("truncation degrees differ: {0} vs {1}")]
    MismatchedTruncation(usize, usize),
    #[error("constant coefficient is not the unit")]
    NonUnitConstant,
    #[error("coefficient {index} has bidegree {found}, expected {index}")]
    Grading { index: usize, found: usize },
    #[error("coefficient ring error: {0}")]
    Ring(String),
}

impl From<AlgebraError> for SeriesError {
    fn from(e: AlgebraError) -> Self {
        SeriesError::Ring(e.to_string())
    }
}
