use thiserror::Error;

use crate::collector::OverlapFailure;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("order {order} is not a positive power of {prime}")]
    OrderNotPrimePower { order: u64, prime: u64 },
    #[error("relation for {0} given twice")]
    DuplicateRelation(String),
    #[error("in comm [{left},{right}] the left generator must have the larger index")]
    CommutatorOrder { left: String, right: String },
}

/// Location-tagged parse failure for `.pcp` documents. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("presentation is malformed: {0}")]
    Invalid(String),
    #[error("presentation is inconsistent ({} failed overlap(s)); first: {}", .0.len(), .0[0])]
    Inconsistent(Vec<OverlapFailure>),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("elements belong to different groups")]
    MixedGroups,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),
    #[error("invalid catalog parameters: {0}")]
    InvalidParams(String),
}

impl Error {
    /// Stable machine-readable code used in JSON reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::Invalid(_) => "invalid",
            Error::Inconsistent(_) => "inconsistent",
            Error::Capacity(_) => "capacity",
            Error::MixedGroups => "mixed_groups",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::UnknownCatalogEntry(_) => "unknown_catalog_entry",
            Error::InvalidParams(_) => "invalid_params",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
