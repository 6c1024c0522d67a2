use thiserror::Error;

#[derive(Debug, Error)]
pub enum MediaError {
    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown token `{0}`")]
    UnknownToken(String),

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    /// An operation needs a complete reverse pairing and the system lacks one.
    #[error("token `{0}` has no declared reverse")]
    MissingReverse(String),

    #[error("{what} limit exceeded: {actual} > {limit}")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    /// A construction that a theorem guarantees to succeed did not.
    #[error("internal defect: {0}")]
    Defect(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl MediaError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Self::Invalid(msg.into())
    }
}

impl From<serde_json::Error> for MediaError {
    fn from(e: serde_json::Error) -> Self {
        Self::Parse(e.to_string())
    }
}

pub type Result<T, E = MediaError> = std::result::Result<T, E>;
