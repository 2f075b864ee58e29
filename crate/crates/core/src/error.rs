use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input is empty")]
    EmptyInput,

    /// The base leaves no room for even one digit (B < 2 or B = 2^32).
    #[error("degenerate compression base {0}")]
    DegenerateBase(u64),

    #[error("value {value} out of range [{low}, {high}]")]
    ValueOutOfRange { value: u64, low: u64, high: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid distribution: {0}")]
    InvalidSpec(String),

    #[error("corrupt stream: {0}")]
    CorruptStream(String),

    #[error("not a polyred container")]
    NotAContainer,

    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),

    #[error("filter `{command}` failed ({status}): {stderr}")]
    PostStageFailed {
        command: String,
        status: String,
        stderr: String,
    },

    #[error("round trip mismatch: {0}")]
    RoundTripMismatch(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn corrupt(msg: impl Into<String>) -> Self {
        Error::CorruptStream(msg.into())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        match err.into_kind() {
            csv::ErrorKind::Io(e) => Error::Io(e),
            other => Error::Io(io::Error::other(format!("{other:?}"))),
        }
    }
}
