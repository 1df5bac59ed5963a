//! File formats and data plumbing: mask run-length encoding, polygon
//! rasterization, annotation/detection/result files, overlay images, and
//! the synthetic scene generator.

pub mod annotations;
pub mod detections;
pub mod overlay;
pub mod polygon;
pub mod results;
pub mod rle;
pub mod synth;

pub use annotations::{load_annotations, save_annotations, SequenceFile};
pub use detections::{load_detections, save_detections, DetectionFile};
pub use overlay::{render_overlay, save_overlay, OverlayItem};
pub use polygon::rasterize_polygons;
pub use results::{load_results, save_results, ResultFile, ResultFrame, ResultItem};
pub use rle::{rle_decode, rle_encode};
pub use synth::{generate_synthetic, OcclusionEvent, SyntheticConfig};

/// Schema version stamped into every file this crate writes.
pub const FORMAT_VERSION: u32 = 1;

/// Reads a whole file to a string, naming the file in the error.
pub(crate) fn read_file(path: &std::path::Path) -> crate::error::Result<String> {
    std::fs::read_to_string(path).map_err(|source| crate::error::Error::FileRead {
        path: path.display().to_string(),
        source,
    })
}
