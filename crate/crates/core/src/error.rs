use thiserror::Error;

/// Crate-wide error type.
///
/// Variants group into four classes, mirrored by the CLI exit codes:
/// invalid parameters (1), malformed input (2), state validation (3)
/// and internal consistency (4).
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid fraction {text:?}: {msg}")]
    BadFraction { text: String, msg: String },

    #[error("log line {line}: {msg}")]
    LogParse { line: usize, msg: String },

    #[error("concat order violation: base ends at t={base_max}, increment starts at t={inc_min}")]
    ConcatOrder { base_max: u64, inc_min: u64 },

    #[error("state file line {line}: {msg}")]
    StateParse { line: usize, msg: String },

    #[error("state file version mismatch: expected {expected:?}, found {found:?}")]
    StateVersion { expected: String, found: String },

    #[error("invalid state: {0}")]
    StateInvariant(String),

    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),

    #[error("log does not match state: state was built over {expected} events, log has {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("deletion log is not a prefix of the base log: {0}")]
    NotAPrefix(String),

    #[error("internal consistency violation: {0}")]
    InternalConsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status the CLI reports for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams(_) | Error::BadFraction { .. } => 1,
            Error::LogParse { .. } | Error::ConcatOrder { .. } | Error::Io(_) => 2,
            Error::StateParse { .. }
            | Error::StateVersion { .. }
            | Error::StateInvariant(_)
            | Error::ParamMismatch(_)
            | Error::SizeMismatch { .. }
            | Error::NotAPrefix(_) => 3,
            Error::InternalConsistency(_) => 4,
        }
    }
}
