//! Ground-truth annotation files: one JSON document per video with
//! per-frame instance masks, stored as run-length counts or polygon rings.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::polygon::{rasterize_polygons, Ring};
use crate::io::rle::{rle_decode, rle_encode};
use crate::io::FORMAT_VERSION;
use crate::metrics::FrameResult;

/// One video's decoded ground truth: per-frame `(id, mask)` lists with
/// instance ids stable across frames.
#[derive(Debug, Clone)]
pub struct SequenceFile {
    pub video_id: String,
    pub width: u32,
    pub height: u32,
    pub frames: Vec<FrameResult>,
}

#[derive(Serialize, Deserialize)]
struct AnnotationsDoc {
    format_version: u32,
    video_id: String,
    width: u32,
    height: u32,
    frames: Vec<FrameDoc>,
}

#[derive(Serialize, Deserialize)]
struct FrameDoc {
    frame: u32,
    instances: Vec<InstanceDoc>,
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    id: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    rle: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    polygon: Option<Vec<Ring>>,
}

pub(crate) fn parse_error(path: &Path, err: &serde_json::Error) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line: err.line(),
        msg: err.to_string(),
    }
}

pub(crate) fn check_format_version(version: u32) -> Result<()> {
    if version != FORMAT_VERSION {
        return Err(Error::Schema(format!(
            "unsupported format_version {version}, expected {FORMAT_VERSION}"
        )));
    }
    Ok(())
}

pub(crate) fn check_dims(width: u32, height: u32) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::Schema(format!(
            "image dims {width}x{height} must be positive"
        )));
    }
    Ok(())
}

pub(crate) fn check_frames_increasing(frames: impl Iterator<Item = u32>) -> Result<()> {
    let mut prev: Option<u32> = None;
    for frame in frames {
        if let Some(p) = prev {
            if frame <= p {
                return Err(Error::Schema(format!(
                    "frame indices must be strictly increasing, saw {frame} after {p}"
                )));
            }
        }
        prev = Some(frame);
    }
    Ok(())
}

/// Loads and decodes an annotation file.
///
/// Every instance carries exactly one mask encoding (`rle` or `polygon`);
/// ids are positive and unique within each frame; frame indices strictly
/// increase; all masks decode to the file's image dims.
pub fn load_annotations(path: impl AsRef<Path>) -> Result<SequenceFile> {
    let path = path.as_ref();
    let text = super::read_file(path)?;
    let doc: AnnotationsDoc = serde_json::from_str(&text).map_err(|e| parse_error(path, &e))?;
    check_format_version(doc.format_version)?;
    check_dims(doc.width, doc.height)?;
    check_frames_increasing(doc.frames.iter().map(|f| f.frame))?;

    let mut frames = Vec::with_capacity(doc.frames.len());
    for frame_doc in &doc.frames {
        let mut items = Vec::with_capacity(frame_doc.instances.len());
        for inst in &frame_doc.instances {
            if inst.id == 0 {
                return Err(Error::InconsistentIds(format!(
                    "instance ids must be positive, frame {} has id 0",
                    frame_doc.frame
                )));
            }
            let mask = match (&inst.rle, &inst.polygon) {
                (Some(counts), None) => rle_decode(counts, doc.width, doc.height).map_err(|e| {
                    Error::Schema(format!(
                        "frame {} instance {}: {e}",
                        frame_doc.frame, inst.id
                    ))
                })?,
                (None, Some(rings)) => rasterize_polygons(rings, doc.width, doc.height)?,
                _ => {
                    return Err(Error::Schema(format!(
                        "frame {} instance {} must carry exactly one of rle or polygon",
                        frame_doc.frame, inst.id
                    )))
                }
            };
            items.push((inst.id, mask));
        }
        frames.push(FrameResult::new(frame_doc.frame, items)?);
    }
    Ok(SequenceFile {
        video_id: doc.video_id,
        width: doc.width,
        height: doc.height,
        frames,
    })
}

/// Saves a sequence as an annotation file; masks are written as run-length
/// counts, so `load(save(x))` reproduces `x` exactly.
pub fn save_annotations(path: impl AsRef<Path>, seq: &SequenceFile) -> Result<()> {
    check_dims(seq.width, seq.height)?;
    check_frames_increasing(seq.frames.iter().map(|f| f.frame))?;
    let doc = AnnotationsDoc {
        format_version: FORMAT_VERSION,
        video_id: seq.video_id.clone(),
        width: seq.width,
        height: seq.height,
        frames: seq
            .frames
            .iter()
            .map(|fr| FrameDoc {
                frame: fr.frame,
                instances: fr
                    .items
                    .iter()
                    .map(|(id, mask)| InstanceDoc {
                        id: *id,
                        rle: Some(rle_encode(mask)),
                        polygon: None,
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::BinaryMask;
    use tempfile::tempdir;

    fn rect_mask(w: u32, h: u32, x0: u32, y0: u32, x1: u32, y1: u32) -> BinaryMask {
        let mut m = BinaryMask::new(w, h).unwrap();
        for y in y0..y1 {
            for x in x0..x1 {
                m.set(x, y, true);
            }
        }
        m
    }

    fn write(path: &Path, text: &str) {
        fs::write(path, text).unwrap();
    }

    #[test]
    fn minimal_file_loads_one_annotation() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("a.json");
        write(
            &path,
            r#"{"format_version":1,"video_id":"v","width":2,"height":2,
               "frames":[{"frame":0,"instances":[{"id":1,"rle":"0 4"}]}]}"#,
        );
        let seq = load_annotations(&path).unwrap();
        assert_eq!(seq.video_id, "v");
        assert_eq!(seq.frames.len(), 1);
        assert_eq!(seq.frames[0].items.len(), 1);
        assert_eq!(seq.frames[0].items[0].0, 1);
        assert_eq!(seq.frames[0].items[0].1.area(), 4);
    }

    #[test]
    fn polygon_instances_are_rasterized() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("a.json");
        write(
            &path,
            r#"{"format_version":1,"video_id":"v","width":8,"height":8,
               "frames":[{"frame":0,"instances":[
                 {"id":1,"polygon":[[1.0,1.0,5.0,1.0,5.0,5.0,1.0,5.0]]}]}]}"#,
        );
        let seq = load_annotations(&path).unwrap();
        assert_eq!(seq.frames[0].items[0].1, rect_mask(8, 8, 1, 1, 5, 5));
    }

    #[test]
    fn duplicate_id_in_frame_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("a.json");
        write(
            &path,
            r#"{"format_version":1,"video_id":"v","width":2,"height":2,
               "frames":[{"frame":0,"instances":[
                 {"id":1,"rle":"0 4"},{"id":1,"rle":"4"}]}]}"#,
        );
        assert!(matches!(
            load_annotations(&path),
            Err(Error::InconsistentIds(_))
        ));
    }

    #[test]
    fn schema_violations_are_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("a.json");

        write(
            &path,
            r#"{"format_version":2,"video_id":"v","width":2,"height":2,"frames":[]}"#,
        );
        assert!(matches!(load_annotations(&path), Err(Error::Schema(_))));

        // Both encodings at once.
        write(
            &path,
            r#"{"format_version":1,"video_id":"v","width":2,"height":2,
               "frames":[{"frame":0,"instances":[
                 {"id":1,"rle":"0 4","polygon":[[0.0,0.0,1.0,0.0,1.0,1.0]]}]}]}"#,
        );
        assert!(matches!(load_annotations(&path), Err(Error::Schema(_))));

        // Counts do not cover the image.
        write(
            &path,
            r#"{"format_version":1,"video_id":"v","width":2,"height":2,
               "frames":[{"frame":0,"instances":[{"id":1,"rle":"0 3"}]}]}"#,
        );
        assert!(matches!(load_annotations(&path), Err(Error::Schema(_))));

        // Out-of-order frames.
        write(
            &path,
            r#"{"format_version":1,"video_id":"v","width":2,"height":2,
               "frames":[{"frame":1,"instances":[]},{"frame":0,"instances":[]}]}"#,
        );
        assert!(matches!(load_annotations(&path), Err(Error::Schema(_))));

        // Id zero.
        write(
            &path,
            r#"{"format_version":1,"video_id":"v","width":2,"height":2,
               "frames":[{"frame":0,"instances":[{"id":0,"rle":"0 4"}]}]}"#,
        );
        assert!(matches!(
            load_annotations(&path),
            Err(Error::InconsistentIds(_))
        ));
    }

    #[test]
    fn malformed_json_reports_the_line() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("a.json");
        write(&path, "{\n  \"format_version\": 1,\n  oops\n}");
        match load_annotations(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn save_then_load_round_trips() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("a.json");
        let seq = SequenceFile {
            video_id: "clip-7".into(),
            width: 16,
            height: 12,
            frames: vec![
                FrameResult::new(
                    0,
                    vec![
                        (1, rect_mask(16, 12, 0, 0, 5, 5)),
                        (2, rect_mask(16, 12, 8, 3, 14, 11)),
                    ],
                )
                .unwrap(),
                FrameResult::new(2, vec![(1, rect_mask(16, 12, 1, 1, 6, 6))]).unwrap(),
            ],
        };
        save_annotations(&path, &seq).unwrap();
        let loaded = load_annotations(&path).unwrap();
        assert_eq!(loaded.video_id, seq.video_id);
        assert_eq!((loaded.width, loaded.height), (seq.width, seq.height));
        assert_eq!(loaded.frames.len(), seq.frames.len());
        for (a, b) in loaded.frames.iter().zip(&seq.frames) {
            assert_eq!(a.frame, b.frame);
            assert_eq!(a.items, b.items);
        }
        // A second save of the loaded copy is byte-identical.
        let path2 = dir.path().join("b.json");
        save_annotations(&path2, &loaded).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&path2).unwrap());
    }

    #[test]
    fn missing_file_error_names_the_file() {
        let err = load_annotations("/nonexistent/nowhere.json").unwrap_err();
        assert!(matches!(err, Error::FileRead { .. }));
        assert!(err.to_string().contains("/nonexistent/nowhere.json"));
    }
}
