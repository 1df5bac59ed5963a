//! Tracking result files: one JSON document per video with per-frame
//! `(id, box, optional mask)` items. Round-trips losslessly.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::annotations::{
    check_dims, check_format_version, check_frames_increasing, parse_error,
};
use crate::io::rle::{rle_decode, rle_encode};
use crate::io::FORMAT_VERSION;
use crate::mask::{BinaryMask, BoundingBox};
use crate::metrics::FrameResult;

/// One tracked instance in one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultItem {
    pub id: u32,
    pub bbox: BoundingBox,
    pub mask: Option<BinaryMask>,
}

/// All tracked instances of one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultFrame {
    pub frame: u32,
    pub items: Vec<ResultItem>,
}

/// One video's tracking output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultFile {
    pub video_id: String,
    pub width: u32,
    pub height: u32,
    pub frames: Vec<ResultFrame>,
}

#[derive(Serialize, Deserialize)]
struct ResultsDoc {
    format_version: u32,
    video_id: String,
    width: u32,
    height: u32,
    frames: Vec<FrameDoc>,
}

#[derive(Serialize, Deserialize)]
struct FrameDoc {
    frame: u32,
    items: Vec<ItemDoc>,
}

#[derive(Serialize, Deserialize)]
struct ItemDoc {
    id: u32,
    #[serde(rename = "box")]
    bbox: [u32; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rle: Option<String>,
}

impl ResultFile {
    /// Per-frame `(id, mask)` lists for evaluation. Every item must carry a
    /// mask; box-only results cannot be scored against mask ground truth.
    pub fn to_frame_results(&self) -> Result<Vec<FrameResult>> {
        let mut frames = Vec::with_capacity(self.frames.len());
        for fr in &self.frames {
            let mut items = Vec::with_capacity(fr.items.len());
            for item in &fr.items {
                let mask = item.mask.clone().ok_or_else(|| {
                    Error::Schema(format!(
                        "frame {} id {} has no mask; evaluation needs masks",
                        fr.frame, item.id
                    ))
                })?;
                items.push((item.id, mask));
            }
            frames.push(FrameResult::new(fr.frame, items)?);
        }
        Ok(frames)
    }
}

/// Loads a result file, validating dims, frame order, box bounds, and
/// per-frame id uniqueness.
pub fn load_results(path: impl AsRef<Path>) -> Result<ResultFile> {
    let path = path.as_ref();
    let text = super::read_file(path)?;
    let doc: ResultsDoc = serde_json::from_str(&text).map_err(|e| parse_error(path, &e))?;
    check_format_version(doc.format_version)?;
    check_dims(doc.width, doc.height)?;
    check_frames_increasing(doc.frames.iter().map(|f| f.frame))?;

    let mut frames = Vec::with_capacity(doc.frames.len());
    for frame_doc in &doc.frames {
        let mut seen = BTreeSet::new();
        let mut items = Vec::with_capacity(frame_doc.items.len());
        for item in &frame_doc.items {
            if item.id == 0 {
                return Err(Error::InconsistentIds(format!(
                    "ids must be positive, frame {} has id 0",
                    frame_doc.frame
                )));
            }
            if !seen.insert(item.id) {
                return Err(Error::InconsistentIds(format!(
                    "id {} appears more than once in frame {}",
                    item.id, frame_doc.frame
                )));
            }
            let [x_min, y_min, x_max, y_max] = item.bbox;
            if x_max > doc.width || y_max > doc.height {
                return Err(Error::Schema(format!(
                    "frame {} id {}: box [{x_min},{y_min},{x_max},{y_max}] exceeds the image",
                    frame_doc.frame, item.id
                )));
            }
            let bbox = BoundingBox::new(x_min, y_min, x_max, y_max).map_err(|e| {
                Error::Schema(format!("frame {} id {}: {e}", frame_doc.frame, item.id))
            })?;
            let mask = match &item.rle {
                Some(counts) => Some(rle_decode(counts, doc.width, doc.height).map_err(|e| {
                    Error::Schema(format!("frame {} id {}: {e}", frame_doc.frame, item.id))
                })?),
                None => None,
            };
            items.push(ResultItem {
                id: item.id,
                bbox,
                mask,
            });
        }
        frames.push(ResultFrame {
            frame: frame_doc.frame,
            items,
        });
    }
    Ok(ResultFile {
        video_id: doc.video_id,
        width: doc.width,
        height: doc.height,
        frames,
    })
}

/// Saves a result file; `load(save(x)) == x` bit-exactly.
pub fn save_results(path: impl AsRef<Path>, file: &ResultFile) -> Result<()> {
    check_dims(file.width, file.height)?;
    check_frames_increasing(file.frames.iter().map(|f| f.frame))?;
    let doc = ResultsDoc {
        format_version: FORMAT_VERSION,
        video_id: file.video_id.clone(),
        width: file.width,
        height: file.height,
        frames: file
            .frames
            .iter()
            .map(|fr| FrameDoc {
                frame: fr.frame,
                items: fr
                    .items
                    .iter()
                    .map(|item| ItemDoc {
                        id: item.id,
                        bbox: [
                            item.bbox.x_min,
                            item.bbox.y_min,
                            item.bbox.x_max,
                            item.bbox.y_max,
                        ],
                        rle: item.mask.as_ref().map(rle_encode),
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
    text.push('\n');
    fs::write(path.as_ref(), text)?;
    Ok(())
}
