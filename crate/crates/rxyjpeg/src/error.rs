use std::io;
use std::path::PathBuf;

use rxyjpeg_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("{path}: {source}")]
    Codec { path: PathBuf, source: CoreError },

    #[error("re-extracted secret does not match the input secret")]
    SecretMismatch,

    #[error("recovered file sha256 {actual} differs from reference {expected}")]
    ReferenceMismatch { expected: String, actual: String },

    #[error("{0}")]
    Usage(String),
}

/// Process exit codes, one per error class.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 2;
    pub const IO: u8 = 3;
    /// Input is not a JPEG this tool handles (progressive, colour, restart markers, ...).
    pub const UNSUPPORTED: u8 = 4;
    /// Secret does not fit, or the cover has no room for a payload.
    pub const CAPACITY: u8 = 5;
    /// Marked file is missing its payload or fails to decode.
    pub const CORRUPT: u8 = 6;
    /// A post-condition check failed.
    pub const VERIFY: u8 = 7;
}

impl CliError {
    pub fn codec(path: impl Into<PathBuf>, source: CoreError) -> Self {
        CliError::Codec { path: path.into(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => exit::IO,
            CliError::Usage(_) => exit::USAGE,
            CliError::SecretMismatch | CliError::ReferenceMismatch { .. } => exit::VERIFY,
            CliError::Codec { source, .. } => match source {
                CoreError::Malformed(_)
                | CoreError::Truncated
                | CoreError::NotBaseline(_)
                | CoreError::HasRestartInterval
                | CoreError::MultiComponent(_)
                | CoreError::MarkerInScan { .. }
                | CoreError::MissingHuffmanTable { .. }
                | CoreError::InvalidTable(_)
                | CoreError::TooManyBlocks(_) => exit::UNSUPPORTED,
                CoreError::SecretTooLarge { .. }
                | CoreError::NoSpareSpace { .. }
                | CoreError::SavingsExceedSegment(_)
                | CoreError::CapacityExceeded { .. }
                | CoreError::CommentCollision => exit::CAPACITY,
                CoreError::VerifyFailed => exit::VERIFY,
                _ => exit::CORRUPT,
            },
        }
    }
}
