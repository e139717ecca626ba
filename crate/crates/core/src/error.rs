use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Two operands that must share a shape do not.
    #[error(
        "dimension mismatch: `{operand}` is {found_w}x{found_h}, expected {expected_w}x{expected_h}"
    )]
    DimensionMismatch {
        operand: &'static str,
        expected_w: usize,
        expected_h: usize,
        found_w: usize,
        found_h: usize,
    },

    #[error("invalid buffer: expected {expected} values, got {found}")]
    BufferLength { expected: usize, found: usize },

    #[error("value {value} at ({x}, {y}) is outside [0, 1]")]
    OutOfRange { x: usize, y: usize, value: f64 },

    /// A three-valued map contained something other than BG/unknown/FG.
    #[error(
        "off-palette value {value} at ({x}, {y}); expected one of 0, 0.5, 1 (bytes 0, 128, 255)"
    )]
    Palette { x: usize, y: usize, value: f64 },

    #[error("unsupported image format: {0}")]
    Format(String),

    #[error("foreground and background masks overlap at ({x}, {y})")]
    Overlap { x: usize, y: usize },

    #[error("{metric} is undefined on an empty region")]
    EmptyRegion { metric: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("channel mismatch: expected {expected} channels, got {found}")]
    ChannelMismatch { expected: usize, found: usize },

    #[error("malformed pyramid: {0}")]
    Pyramid(String),

    #[error("no matching ids between prediction and ground-truth directories")]
    NoMatchedIds,

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("png decode: {0}")]
    PngDecode(#[from] png::DecodingError),

    #[error("png encode: {0}")]
    PngEncode(#[from] png::EncodingError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn at(self, path: impl Into<PathBuf>) -> Error {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }
}
