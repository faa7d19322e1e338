use thiserror::Error;

use crate::network::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument outside the domain of the operation (quantile level, sample count, k).
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter, question, answer or node name that does not resolve.
    #[error("lookup error: {0}")]
    Lookup(String),

    /// A value with the wrong shape for where it is used.
    #[error("schema error: {0}")]
    Schema(String),

    /// An operation that is not allowed in the current consultation state.
    #[error("state error: {0}")]
    State(String),

    #[error("decision tree has {leaves} leaves, more than the limit of {limit}")]
    TooLarge { leaves: u128, limit: u128 },

    #[error("divergence undefined: generic distribution has zero variance")]
    UndefinedDivergence,

    #[error("parse error at line {line}, column {column} (byte offset {offset}): {message}")]
    Parse {
        line: usize,
        column: usize,
        offset: usize,
        message: String,
    },

    #[error("invalid model: {0}")]
    Invalid(ValidationReport),
}
