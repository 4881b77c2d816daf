use thiserror::Error;

/// Errors reported by the simplifiers, the oracles and the record codecs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("point lies inside or on the polygon")]
    PointInside,
    #[error("every frontier cell is empty")]
    AllEmpty,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("working storage over budget: {0}")]
    Budget(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
