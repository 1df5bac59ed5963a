//! Error type shared by every module of the crate.

use thiserror::Error;

/// All failure modes surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A mask with no set pixels was given to an operation that needs one.
    #[error("mask has no set pixels")]
    EmptyMask,

    /// An input collection that must be nonempty was empty.
    #[error("input collection is empty")]
    EmptyInput,

    /// Two inputs that must share dimensions do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// IoU of two empty masks is undefined.
    #[error("both masks are empty; IoU is undefined")]
    BothEmpty,

    /// Width/height/stride arguments describe an impossible geometry.
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    /// An index addressed a cell or pixel outside its grid.
    #[error("index out of range: {0}")]
    OutOfRange(String),

    /// An instance mask does not match the image dimensions of the grid.
    #[error("mask does not fit image bounds: {0}")]
    MaskOutOfBounds(String),

    /// Two sample assignments that must share a grid do not.
    #[error("assignments are defined over different grids")]
    GridMismatch,

    /// A numeric input or intermediate value was NaN or infinite.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// A classification label does not fit the classifier's output range.
    #[error("label {label} exceeds classifier range (num classes {num_classes})")]
    LabelOutOfRange { label: u32, num_classes: usize },

    /// A batch reduction was asked for on an empty batch.
    #[error("batch is empty")]
    EmptyBatch,

    /// The tracker was stepped before its first frame was initialized.
    #[error("tracker is not initialized; call init with the first frame")]
    NotInitialized,

    /// Evaluation requires at least one ground-truth mask.
    #[error("ground truth contains no instances")]
    EmptyGroundTruth,

    /// Dataset statistics require at least one sequence.
    #[error("dataset is empty")]
    EmptyDataset,

    /// An assignment has no positive cells, so a fraction over them is undefined.
    #[error("assignment has no positive cells")]
    NoPositives,

    /// A file could not be parsed; carries location info when available.
    #[error("parse error in {path} (line {line}): {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// A file parsed but violates the documented schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// Instance ids violate the per-frame uniqueness or positivity rules.
    #[error("inconsistent instance ids: {0}")]
    InconsistentIds(String),

    /// A configuration value is outside its documented domain.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A named file could not be read.
    #[error("cannot read {path}: {source}")]
    FileRead {
        path: String,
        source: std::io::Error,
    },

    /// An underlying I/O operation failed.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
