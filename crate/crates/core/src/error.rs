use thiserror::Error;

/// Errors reported by the library.
///
/// `Internal` marks "this should be impossible if the mathematics holds"
/// conditions (a verified structural invariant failed); everything else is a
/// problem with the caller's input or with resource limits.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("P={p}, Q={q}, b={base} must be pairwise coprime")]
    NotCoprime { p: u64, q: u64, base: u64 },

    #[error("size limit exceeded: {0}")]
    TooLarge(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn too_large(msg: impl Into<String>) -> Self {
        Error::TooLarge(msg.into())
    }

    pub fn overflow(msg: impl Into<String>) -> Self {
        Error::Overflow(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    /// True for inconsistencies that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
