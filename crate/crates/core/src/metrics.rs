//! Sequence-level evaluation of tracking-and-segmentation output against
//! ground truth (sMOTSA / MOTSA / MOTSP), plus dataset complexity statistics.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{mask_iou, BinaryMask};

/// Matching threshold used when none is configured: a prediction must
/// overlap a ground-truth mask with IoU strictly above this to count as a
/// true positive.
pub const DEFAULT_MATCH_IOU: f64 = 0.5;

/// Mask-area threshold below which an instance counts as tiny (32·32).
pub const DEFAULT_TINY_AREA: u64 = 1024;
/// Mask-area threshold above which an instance counts as large (96·96).
pub const DEFAULT_LARGE_AREA: u64 = 9216;

/// One frame of per-id masks — either predictions or ground truth.
#[derive(Debug, Clone)]
pub struct FrameResult {
    pub frame: u32,
    /// `(instance id, mask)`; ids are unique within the frame, masks of
    /// distinct ids may overlap.
    pub items: Vec<(u32, BinaryMask)>,
}

impl FrameResult {
    pub fn new(frame: u32, items: Vec<(u32, BinaryMask)>) -> Result<Self> {
        let fr = FrameResult { frame, items };
        fr.check_unique_ids()?;
        Ok(fr)
    }

    fn check_unique_ids(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (id, _) in &self.items {
            if !seen.insert(*id) {
                return Err(Error::InconsistentIds(format!(
                    "id {} appears more than once in frame {}",
                    id, self.frame
                )));
            }
        }
        Ok(())
    }
}

/// Tracking-and-segmentation quality over one or more sequences.
///
/// `motsa = (tp − fp − ids) / gt_total`, `motsp = soft_tp / tp` (0 when tp
/// is 0), `smotsa = (soft_tp − fp − ids) / gt_total`, where `soft_tp` is the
/// summed IoU of matched pairs and `gt_total` the number of ground-truth
/// instance-frames.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotsReport {
    pub smotsa: f64,
    pub motsa: f64,
    pub motsp: f64,
    #[serde(rename = "tp")]
    pub true_positives: u64,
    #[serde(rename = "fp")]
    pub false_positives: u64,
    #[serde(rename = "fn")]
    pub false_negatives: u64,
    #[serde(rename = "ids")]
    pub id_switches: u64,
    pub soft_tp: f64,
    pub gt_total: u64,
}

/// Raw accumulators for [`MotsReport`]; summable across sequences.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MotsCounts {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub id_switches: u64,
    pub soft_tp: f64,
    pub gt_total: u64,
}

impl MotsCounts {
    pub fn add(&mut self, other: &MotsCounts) {
        self.true_positives += other.true_positives;
        self.false_positives += other.false_positives;
        self.false_negatives += other.false_negatives;
        self.id_switches += other.id_switches;
        self.soft_tp += other.soft_tp;
        self.gt_total += other.gt_total;
    }

    /// Final ratios. Errors when there is no ground truth to normalize by.
    pub fn into_report(self) -> Result<MotsReport> {
        if self.gt_total == 0 {
            return Err(Error::EmptyGroundTruth);
        }
        let gt = self.gt_total as f64;
        let tp = self.true_positives as f64;
        let fp = self.false_positives as f64;
        let ids = self.id_switches as f64;
        Ok(MotsReport {
            smotsa: (self.soft_tp - fp - ids) / gt,
            motsa: (tp - fp - ids) / gt,
            motsp: if self.true_positives > 0 {
                self.soft_tp / tp
            } else {
                0.0
            },
            true_positives: self.true_positives,
            false_positives: self.false_positives,
            false_negatives: self.false_negatives,
            id_switches: self.id_switches,
            soft_tp: self.soft_tp,
            gt_total: self.gt_total,
        })
    }
}

fn check_threshold(iou_threshold: f64) -> Result<()> {
    if !iou_threshold.is_finite() || !(0.0..=1.0).contains(&iou_threshold) {
        return Err(Error::InvalidConfig(
            "matching IoU threshold must be within [0, 1]".into(),
        ));
    }
    Ok(())
}

/// Matches one frame of predictions against one frame of ground truth.
///
/// Candidate pairs with mask IoU strictly above `iou_threshold` are taken
/// greedily by descending IoU (ties: smaller ground-truth id, then smaller
/// predicted id), each mask used at most once. Returns
/// `(predicted id, ground-truth id, iou)` triples in selection order.
pub fn match_frame_masks(
    pred: &FrameResult,
    gt: &FrameResult,
    iou_threshold: f64,
) -> Result<Vec<(u32, u32, f64)>> {
    check_threshold(iou_threshold)?;
    pred.check_unique_ids()?;
    gt.check_unique_ids()?;

    let mut candidates: Vec<(u32, u32, f64)> = Vec::new();
    for (pid, pmask) in &pred.items {
        for (gid, gmask) in &gt.items {
            if pmask.is_empty() && gmask.is_empty() {
                pmask.check_same_dims(gmask)?;
                continue;
            }
            let iou = mask_iou(pmask, gmask)?;
            if iou > iou_threshold {
                candidates.push((*pid, *gid, iou));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .expect("IoU is finite")
            .then(a.1.cmp(&b.1))
            .then(a.0.cmp(&b.0))
    });

    let mut used_pred = BTreeSet::new();
    let mut used_gt = BTreeSet::new();
    let mut matches = Vec::new();
    for (pid, gid, iou) in candidates {
        if used_pred.contains(&pid) || used_gt.contains(&gid) {
            continue;
        }
        used_pred.insert(pid);
        used_gt.insert(gid);
        matches.push((pid, gid, iou));
    }
    Ok(matches)
}

fn index_by_frame(seq: &[FrameResult]) -> Result<BTreeMap<u32, &FrameResult>> {
    let mut by_frame = BTreeMap::new();
    for fr in seq {
        if by_frame.insert(fr.frame, fr).is_some() {
            return Err(Error::Schema(format!(
                "frame {} appears more than once in the sequence",
                fr.frame
            )));
        }
    }
    Ok(by_frame)
}

/// Accumulates matching counts over a whole sequence without normalizing.
///
/// Frames are aligned by index over the union of both sequences' frames; a
/// frame absent from one side contributes only misses (or only false
/// positives). An id switch is counted whenever a ground-truth identity's
/// matched predicted id differs from the most recent previously matched
/// predicted id for that identity, including across unmatched gaps.
pub fn accumulate_mots(
    pred: &[FrameResult],
    gt: &[FrameResult],
    iou_threshold: f64,
) -> Result<MotsCounts> {
    check_threshold(iou_threshold)?;
    let pred_by_frame = index_by_frame(pred)?;
    let gt_by_frame = index_by_frame(gt)?;

    let empty = FrameResult {
        frame: 0,
        items: Vec::new(),
    };
    let frames: BTreeSet<u32> = pred_by_frame
        .keys()
        .chain(gt_by_frame.keys())
        .copied()
        .collect();

    let mut counts = MotsCounts::default();
    let mut last_pred_for_gt: BTreeMap<u32, u32> = BTreeMap::new();
    for frame in frames {
        let p = pred_by_frame.get(&frame).copied().unwrap_or(&empty);
        let g = gt_by_frame.get(&frame).copied().unwrap_or(&empty);
        let matches = match_frame_masks(p, g, iou_threshold)?;

        counts.gt_total += g.items.len() as u64;
        counts.true_positives += matches.len() as u64;
        counts.false_positives += (p.items.len() - matches.len()) as u64;
        counts.false_negatives += (g.items.len() - matches.len()) as u64;
        for (pid, gid, iou) in matches {
            counts.soft_tp += iou;
            if let Some(prev) = last_pred_for_gt.insert(gid, pid) {
                if prev != pid {
                    counts.id_switches += 1;
                }
            }
        }
    }
    Ok(counts)
}

/// Evaluates a predicted sequence against ground truth.
///
/// See [`accumulate_mots`] for the matching and id-switch rules and
/// [`MotsCounts::into_report`] for the ratio definitions.
pub fn compute_mots(
    pred: &[FrameResult],
    gt: &[FrameResult],
    iou_threshold: f64,
) -> Result<MotsReport> {
    accumulate_mots(pred, gt, iou_threshold)?.into_report()
}

/// Mask-size bucket of a single instance-frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SizeClass {
    Tiny,
    Medium,
    Large,
}

/// Buckets a mask area: below `tiny_area` is tiny, above `large_area` is
/// large, anything else (both boundaries included) is medium.
pub fn size_class(area: u64, tiny_area: u64, large_area: u64) -> SizeClass {
    if area < tiny_area {
        SizeClass::Tiny
    } else if area > large_area {
        SizeClass::Large
    } else {
        SizeClass::Medium
    }
}

/// Dataset difficulty summary over one or more ground-truth sequences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityStats {
    /// Fraction of instance-frames whose mask is not large (tiny or medium).
    pub small_target_fraction: f64,
    /// Total distinct instance ids, summed per sequence.
    pub instance_count: u64,
    /// Distinct same-sequence instance pairs whose masks overlap (IoU above
    /// the configured minimum) in at least one frame.
    pub overlapping_count: u64,
}

/// Computes [`ComplexityStats`] over ground-truth sequences.
///
/// `overlap_iou_min` is a strict lower bound: at its default 0.0 any shared
/// pixel marks a pair as overlapping.
pub fn dataset_stats(
    dataset: &[Vec<FrameResult>],
    tiny_area: u64,
    large_area: u64,
    overlap_iou_min: f64,
) -> Result<ComplexityStats> {
    if tiny_area > large_area {
        return Err(Error::InvalidConfig(
            "tiny-area threshold exceeds large-area threshold".into(),
        ));
    }
    if !overlap_iou_min.is_finite() || !(0.0..=1.0).contains(&overlap_iou_min) {
        return Err(Error::InvalidConfig(
            "overlap IoU minimum must be within [0, 1]".into(),
        ));
    }

    let mut instance_frames: u64 = 0;
    let mut not_large: u64 = 0;
    let mut instance_count: u64 = 0;
    let mut overlapping_count: u64 = 0;
    for seq in dataset {
        index_by_frame(seq)?;
        let mut ids = BTreeSet::new();
        let mut overlapping_pairs: BTreeSet<(u32, u32)> = BTreeSet::new();
        for fr in seq {
            fr.check_unique_ids()?;
            for (id, mask) in &fr.items {
                ids.insert(*id);
                instance_frames += 1;
                if size_class(mask.area(), tiny_area, large_area) != SizeClass::Large {
                    not_large += 1;
                }
            }
            for (i, (id_a, mask_a)) in fr.items.iter().enumerate() {
                for (id_b, mask_b) in fr.items.iter().skip(i + 1) {
                    if mask_a.is_empty() || mask_b.is_empty() {
                        continue;
                    }
                    if mask_iou(mask_a, mask_b)? > overlap_iou_min {
                        let pair = (*id_a.min(id_b), *id_a.max(id_b));
                        overlapping_pairs.insert(pair);
                    }
                }
            }
        }
        instance_count += ids.len() as u64;
        overlapping_count += overlapping_pairs.len() as u64;
    }
    if instance_frames == 0 {
        return Err(Error::EmptyDataset);
    }
    Ok(ComplexityStats {
        small_target_fraction: not_large as f64 / instance_frames as f64,
        instance_count,
        overlapping_count,
    })
}
