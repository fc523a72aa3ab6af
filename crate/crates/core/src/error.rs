use thiserror::Error;

/// Errors raised anywhere in the hole-detection toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error, line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("serialization error: {0}")]
    Serialize(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("position ({x}, {y}) outside raster {width}x{height}")]
    OutOfBounds {
        x: i64,
        y: i64,
        width: u32,
        height: u32,
    },

    #[error("not a hole: {0} boundary nodes (at least 4 required)")]
    NotAHole(usize),

    #[error("layout engine failed: {0}")]
    Engine(String),

    #[error("detector failed: {0}")]
    Detector(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("image error: {0}")]
    Image(#[from] image::ImageError),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
