use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("frame {frame}: {source}")]
    Frame {
        frame: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("embedding provider failed on frame {frame}: {message}")]
    Provider { frame: usize, message: String },

    #[error("captioning failed for {path}: {message}")]
    Caption { path: PathBuf, message: String },

    #[error("quality gate failed for {path}: {reason}")]
    QualityGate { path: PathBuf, reason: String },

    #[error("scale estimation failed between frames {from} and {to}: {reason}")]
    ScaleEstimation {
        from: usize,
        to: usize,
        reason: String,
    },

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("malformed tensor file: {0}")]
    TensorFormat(String),

    #[error("missing frame files: {0:?}")]
    MissingFrames(Vec<PathBuf>),

    #[error("plugin failed: {0}")]
    Plugin(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: ::image::ImageError,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn image(path: &std::path::Path, source: ::image::ImageError) -> Self {
        Error::Image {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_frame(self, frame: usize) -> Self {
        Error::Frame {
            frame,
            source: Box::new(self),
        }
    }
}

/// Checks `min <= value <= max` and rejects non-finite values.
pub(crate) fn check_range(what: &'static str, value: f64, min: f64, max: f64) -> Result<f64> {
    if value.is_finite() && value >= min && value <= max {
        Ok(value)
    } else {
        Err(Error::OutOfRange {
            what,
            value,
            min,
            max,
        })
    }
}
