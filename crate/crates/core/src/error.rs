use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected} coefficients, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid modulus {0}")]
    InvalidModulus(i64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("sampling weight {requested} exceeds ring degree {n}")]
    WeightOverflow { requested: usize, n: usize },

    #[error("element is not invertible in the ring")]
    NoInverse,

    #[error("no invertible private polynomial after {attempts} attempts")]
    ResampleExhausted { attempts: u32 },

    #[error("message coefficients must be ternary")]
    NonTernaryMessage,

    #[error("expansion depth {0} exceeds the maximum of 2")]
    DepthExceeded(u8),

    #[error("integrity failure: {0}")]
    IntegrityFailure(String),

    #[error("input of {0} bytes is too large to encode")]
    Oversize(usize),

    #[error("malformed encoding: {0}")]
    Format(String),

    #[error("duplicate request id {0}")]
    DuplicateRequest(String),

    #[error("unknown request id {0}")]
    UnknownRequest(String),

    #[error("unexpected message kind {found}, expected {expected}")]
    UnexpectedMessage { expected: String, found: String },

    #[error("flow step `{step}` failed: {source}")]
    Step {
        step: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn integrity(msg: impl Into<String>) -> Self {
        Error::IntegrityFailure(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    /// Innermost error, looking through flow-step tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_integrity_failure(&self) -> bool {
        matches!(self.root(), Error::IntegrityFailure(_))
    }
}
