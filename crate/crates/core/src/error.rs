use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty response vector")]
    EmptyInput,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("group '{group}' has {size} non-missing member(s); at least 2 are required")]
    GroupTooSmall { group: String, size: usize },

    #[error("singular design")]
    SingularDesign,

    #[error("degenerate ranks")]
    DegenerateRanks,

    #[error("covariate column {column} is constant")]
    ConstantCovariate { column: usize },

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("angle undefined")]
    AngleUndefined,

    #[error("OLS requires raw responses")]
    MissingResponses,

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{failed} of {total} resamples failed to fit")]
    TooManyFailures { failed: usize, total: usize },

    #[error("fit with row {index} left out failed: {reason}")]
    LeaveOutFailed { index: usize, reason: String },

    #[error("n = {n} exceeds the studentized interval cap of {cap}; use the jackknife normal interval instead")]
    SampleTooLarge { n: usize, cap: usize },

    #[error("invalid scenario configuration: {0}")]
    InvalidConfig(String),
}
