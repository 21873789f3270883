//! Error type shared by every module in the crate.

use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Tensor shapes (or shape-dependent arguments) do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Padding amounts are invalid for the requested mode, e.g. a Reflect
    /// pad as large as the dimension itself.
    #[error("invalid padding: {0}")]
    InvalidPadding(String),

    /// A scale factor with a zero component, or an unparseable "r/s" string.
    #[error("invalid scale factor: {0}")]
    InvalidFactor(String),

    /// Tensors with more than three spatial dimensions (or none at all).
    #[error("unsupported rank {0}: expected 1 to 3 spatial dimensions")]
    UnsupportedRank(usize),

    /// A bad parameter that is not a shape, factor, or padding problem.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Image file whose magic number we do not recognize, or a pixel layout
    /// we do not handle (e.g. RGBA PNG).
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    /// Image with more than 8 bits per sample.
    #[error("unsupported bit depth: {0}")]
    UnsupportedBitDepth(String),

    /// Image file that ends before its header promises.
    #[error("truncated image file: {0}")]
    Truncated(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Error bubbled up from the PNG codec.
    #[error("png: {0}")]
    Png(String),
}

pub type Result<T> = std::result::Result<T, Error>;
