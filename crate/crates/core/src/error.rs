use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime below 2^31")]
    NotPrime(u64),

    #[error("elements belong to different fields (p = {0} and p = {1})")]
    FieldMismatch(u64, u64),

    /// Arithmetic that is undefined for the given input, such as inverting zero.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("sets overlap at element {0}")]
    Overlap(u64),

    #[error("invalid set family: {0}")]
    InvalidFamily(String),

    #[error("{name} = {value} is out of range ({expected})")]
    OutOfRange {
        name: &'static str,
        value: u64,
        expected: String,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("duplicate share identifier x = {0}")]
    DuplicateIdentifier(u64),

    #[error("need {needed} shares, got {got}")]
    NotEnoughShares { needed: usize, got: usize },

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }

    pub(crate) fn out_of_range(name: &'static str, value: u64, expected: impl Into<String>) -> Self {
        Error::OutOfRange {
            name,
            value,
            expected: expected.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
