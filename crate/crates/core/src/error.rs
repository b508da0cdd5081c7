use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config: `{field}` {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("invalid intrinsics: {0}")]
    InvalidIntrinsics(String),

    #[error("invalid pose: {0}")]
    InvalidPose(String),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("dimension mismatch: expected {expected_w}x{expected_h}, got {got_w}x{got_h}")]
    DimensionMismatch {
        expected_w: usize,
        expected_h: usize,
        got_w: usize,
        got_h: usize,
    },

    #[error("validity mask is empty")]
    EmptyMask,

    #[error("non-finite or negative error value: {0}")]
    InvalidErrorValue(f64),

    #[error("empty frame sequence")]
    EmptySequence,

    #[error("frame {got} arrived after frame {previous}; frames must be strictly ordered")]
    OutOfOrder { previous: usize, got: usize },

    #[error("invalid count: {0}")]
    InvalidCount(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("zero associated frames")]
    NoAssociatedFrames,

    #[error("frame source failed: {0}")]
    Source(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
