use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the labeling pipeline and its file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate cluster: {0}")]
    DegenerateCluster(String),

    #[error("no cluster found near click")]
    NoClusterFound,

    #[error("frame {0} not found in sequence")]
    FrameNotFound(i64),

    #[error("need at least 3 alignment scores to derive thresholds, got {0}")]
    InsufficientScores(usize),

    #[error("loss weight lambda must be non-negative, got {0}")]
    NegativeLambda(f64),

    #[error("{}:{position}: {reason}", path.display())]
    Parse {
        path: PathBuf,
        /// Human-readable location, e.g. `line 3` or `byte offset 48`.
        position: String,
        reason: String,
    },

    #[error("{frames} frames but {poses} poses")]
    MissingPose { frames: usize, poses: usize },

    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("frame scope mismatch, offending frames: {0:?}")]
    ScopeMismatch(Vec<i64>),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(
        path: impl Into<PathBuf>,
        position: impl Into<String>,
        reason: impl Into<String>,
    ) -> Self {
        Error::Parse {
            path: path.into(),
            position: position.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
