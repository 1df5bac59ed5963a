//! Detection files: line-delimited JSON with one header line (video id,
//! image dims, embedding dimensionality) followed by one record per
//! detection, sorted by frame.
//!
//! Embedding components are written as decimal text with 9 significant
//! digits; loading them back lands within 1e-7 relative error, and a
//! save → load → save cycle is byte-identical. Everything else (boxes,
//! frames, scores, masks) round-trips exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::annotations::{check_dims, check_format_version};
use crate::io::rle::{rle_decode, rle_encode};
use crate::io::FORMAT_VERSION;
use crate::loss::{Embedding, DEFAULT_EMBEDDING_DIM};
use crate::mask::BoundingBox;
use crate::track::Detection;

/// One video's detector output.
#[derive(Debug, Clone)]
pub struct DetectionFile {
    pub video_id: String,
    pub width: u32,
    pub height: u32,
    pub embedding_dim: usize,
    pub detections: Vec<Detection>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format_version: u32,
    video_id: String,
    width: u32,
    height: u32,
    #[serde(default = "default_embedding_dim")]
    embedding_dim: usize,
}

fn default_embedding_dim() -> usize {
    DEFAULT_EMBEDDING_DIM
}

#[derive(Deserialize)]
struct Record {
    frame: u32,
    #[serde(rename = "box")]
    bbox: [u32; 4],
    score: f64,
    embedding: Vec<f64>,
    #[serde(default)]
    rle: Option<String>,
}

fn line_error(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Loads a detection file, validating scores in `[0, 1]`, embedding lengths
/// against the header, boxes within the image, and non-decreasing frames.
pub fn load_detections(path: impl AsRef<Path>) -> Result<DetectionFile> {
    let path = path.as_ref();
    let text = super::read_file(path)?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());

    let (header_no, header_line) = lines
        .next()
        .ok_or_else(|| line_error(path, 1, "file is empty; expected a header line"))?;
    let header: Header = serde_json::from_str(header_line)
        .map_err(|e| line_error(path, header_no + 1, e.to_string()))?;
    check_format_version(header.format_version)?;
    check_dims(header.width, header.height)?;
    if header.embedding_dim == 0 {
        return Err(Error::Schema("embedding_dim must be positive".into()));
    }

    let mut detections = Vec::new();
    let mut prev_frame: Option<u32> = None;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let rec: Record =
            serde_json::from_str(line).map_err(|e| line_error(path, lineno, e.to_string()))?;
        if let Some(prev) = prev_frame {
            if rec.frame < prev {
                return Err(line_error(
                    path,
                    lineno,
                    format!(
                        "frames must be non-decreasing, saw {} after {}",
                        rec.frame, prev
                    ),
                ));
            }
        }
        prev_frame = Some(rec.frame);
        if !(0.0..=1.0).contains(&rec.score) {
            return Err(line_error(
                path,
                lineno,
                format!("score {} is outside [0, 1]", rec.score),
            ));
        }
        if rec.embedding.len() != header.embedding_dim {
            return Err(line_error(
                path,
                lineno,
                format!(
                    "embedding has {} components, header says {}",
                    rec.embedding.len(),
                    header.embedding_dim
                ),
            ));
        }
        let [x_min, y_min, x_max, y_max] = rec.bbox;
        if x_max > header.width || y_max > header.height {
            return Err(line_error(
                path,
                lineno,
                format!("box [{x_min},{y_min},{x_max},{y_max}] exceeds the image"),
            ));
        }
        let bbox = BoundingBox::new(x_min, y_min, x_max, y_max)
            .map_err(|e| line_error(path, lineno, e.to_string()))?;
        let embedding =
            Embedding::new(rec.embedding).map_err(|e| line_error(path, lineno, e.to_string()))?;
        let mask = match rec.rle {
            Some(counts) => Some(
                rle_decode(&counts, header.width, header.height)
                    .map_err(|e| line_error(path, lineno, e.to_string()))?,
            ),
            None => None,
        };
        detections.push(Detection::new(bbox, rec.score, embedding, mask, rec.frame)?);
    }
    Ok(DetectionFile {
        video_id: header.video_id,
        width: header.width,
        height: header.height,
        embedding_dim: header.embedding_dim,
        detections,
    })
}

/// Writes a detection file. Embeddings are rendered with 9 significant
/// digits; scores use the shortest exact decimal form.
pub fn save_detections(path: impl AsRef<Path>, file: &DetectionFile) -> Result<()> {
    check_dims(file.width, file.height)?;
    let header = Header {
        format_version: FORMAT_VERSION,
        video_id: file.video_id.clone(),
        width: file.width,
        height: file.height,
        embedding_dim: file.embedding_dim,
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for det in &file.detections {
        if det.embedding.dim() != file.embedding_dim {
            return Err(Error::Schema(format!(
                "detection at frame {} has a {}-dim embedding, file says {}",
                det.frame,
                det.embedding.dim(),
                file.embedding_dim
            )));
        }
        let b = det.bbox;
        write!(
            out,
            "{{\"frame\":{},\"box\":[{},{},{},{}],\"score\":{},\"embedding\":[",
            det.frame,
            b.x_min,
            b.y_min,
            b.x_max,
            b.y_max,
            serde_json::to_string(&det.score).expect("finite score"),
        )
        .expect("writing to a string cannot fail");
        for (i, v) in det.embedding.as_slice().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v:.8e}").expect("writing to a string cannot fail");
        }
        out.push(']');
        if let Some(mask) = &det.mask {
            if mask.width() != file.width || mask.height() != file.height {
                return Err(Error::Schema(format!(
                    "detection mask at frame {} is {}x{}, file says {}x{}",
                    det.frame,
                    mask.width(),
                    mask.height(),
                    file.width,
                    file.height
                )));
            }
            write!(out, ",\"rle\":\"{}\"", rle_encode(mask))
                .expect("writing to a string cannot fail");
        }
        out.push('}');
        out.push('\n');
    }
    fs::write(path.as_ref(), out)?;
    Ok(())
}
