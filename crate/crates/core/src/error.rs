use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("zero divisor in étale algebra")]
    ZeroDivisor,

    #[error("pair not balanced: {0}")]
    NotBalanced(String),

    #[error("undecided at precision cap of {0} bits")]
    UndecidedAtCap(u32),

    #[error("place mismatch: {0} vs {1}")]
    PlaceMismatch(String, String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status for this error: 2 for bad input or unsupported
    /// requests, 3 when an internal invariant or precision limit fails.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::InvalidInput(_) | Error::Unsupported(_) | Error::PlaceMismatch(..) => 2,
            Error::ZeroDivisor | Error::NotBalanced(_) | Error::UndecidedAtCap(_) | Error::Invariant(_) => 3,
        }
    }
}
