use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("label map is empty")]
    EmptyMap,
    #[error("label {label} spans {components} disconnected components")]
    DisconnectedLabel { label: u32, components: usize },
    #[error("convex hull of an empty point set")]
    EmptyInput,
    #[error("polygon has zero area")]
    DegeneratePolygon,
    #[error("shape size {size} is below the minimum of {min}")]
    SizeTooSmall { size: u32, min: u32 },
    #[error("shape vanished under boundary noise")]
    ShapeVanished,
    #[error("quadtree input must be square, got {width}x{height}")]
    NonSquareImage { width: u32, height: u32 },
    #[error("quadtree input side {0} is not a power of two")]
    NonPowerOfTwoSide(u32),
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (u32, u32), right: (u32, u32) },
    #[error("graph has no edges")]
    NoEdges,
    #[error("nothing to plot")]
    EmptySeries,
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt file {path}: {reason}")]
    CorruptFile { path: PathBuf, reason: String },
    #[error("label {label} exceeds container maximum {max}")]
    Overflow { label: u32, max: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn corrupt(path: impl Into<PathBuf>, reason: impl ToString) -> Self {
        Error::CorruptFile {
            path: path.into(),
            reason: reason.to_string(),
        }
    }
}
