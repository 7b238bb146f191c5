use thiserror::Error;

/// Failure classes shared by every operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ApcError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("not found: {0}")]
    NotFound(String),
    /// A proven implication failed numerically. Always a bug or a falsification.
    #[error("internal error: {0}")]
    Internal(String),
}

impl ApcError {
    pub fn kind(&self) -> &'static str {
        match self {
            ApcError::InvalidArgument(_) => "invalid-argument",
            ApcError::Precondition(_) => "precondition-error",
            ApcError::ResourceLimit(_) => "resource-limit",
            ApcError::NotFound(_) => "not-found",
            ApcError::Internal(_) => "internal-error",
        }
    }
}

pub type Result<T> = std::result::Result<T, ApcError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(ApcError::InvalidArgument(msg.into()))
}
