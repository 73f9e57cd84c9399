use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// An internal consistency check failed; this is a bug, never an input problem.
    #[error("internal error: {0}")]
    Internal(String),
    #[error("root structure violation: {0}")]
    RootStructureViolation(String),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("dimension mismatch in degree {degree}: expected {expected}, found {found}")]
    DimensionMismatch { degree: u32, expected: String, found: usize },
    #[error("oracle inconsistency: {0}")]
    OracleInconsistency(String),
    #[error("degree {requested} exceeds the configured limit {limit}")]
    DegreeLimitExceeded { requested: u64, limit: u32 },
    #[error("coverage violation: value {value} not reached from n = {n}")]
    CoverageViolation { value: u64, n: u64 },
    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
