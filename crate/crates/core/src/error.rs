use std::path::PathBuf;

use thiserror::Error;

use crate::frameio::FrameGeometry;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed y4m header: {0}")]
    MalformedHeader(String),

    #[error("unsupported y4m colorspace `{0}` (only C444 is accepted)")]
    UnsupportedColorspace(String),

    #[error("malformed frame marker at frame {index}")]
    MalformedFrameMarker { index: usize },

    #[error("truncated frame {index}: expected {expected} payload bytes, got {actual}")]
    TruncatedFrame {
        index: usize,
        expected: usize,
        actual: usize,
    },

    #[error("no frame files found in {0}")]
    EmptyDirectory(PathBuf),

    #[error("geometry mismatch: expected {expected}, got {actual}")]
    GeometryMismatch {
        expected: FrameGeometry,
        actual: FrameGeometry,
    },

    #[error("{path}: not a binary P6 ppm")]
    BadMagic { path: PathBuf },

    #[error("{path}: {reason}")]
    MalformedPpm { path: PathBuf, reason: String },

    #[error("frame rate is required for {0} input")]
    MissingFrameRate(&'static str),

    #[error("stream contains no frames")]
    EmptyStream,

    #[error("cannot downscale {source_geometry} to larger target {target}")]
    UpscaleRequested {
        source_geometry: FrameGeometry,
        target: FrameGeometry,
    },

    #[error("frames are not consecutive: {prev} then {cur}")]
    NonConsecutiveFrames { prev: usize, cur: usize },

    #[error("trend accumulation needs at least one frame delta")]
    EmptyInput,

    #[error("length mismatch: {left} stamps vs {right} increments")]
    LengthMismatch { left: usize, right: usize },

    #[error("cut frame {frame} outside stream of {frame_count} frames")]
    IntervalOutOfRange { frame: usize, frame_count: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("corrupt cache entry {path}: {reason}")]
    CacheCorrupt { path: PathBuf, reason: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the error was caused by the input data or user-supplied
    /// parameters rather than by a failure inside the tool.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::CacheCorrupt { .. } | Error::Json(_))
    }
}
