//! Subcommand implementations. Each takes its parsed argument struct and
//! writes data output to the given writer (or to files named by the
//! arguments); none of them print status text, so output stays
//! byte-deterministic for fixed flags and inputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::assign::{
    assign, build_grids, detect_ambiguous, inside_mask_fraction, mix_positive_sets,
    resolve_ambiguous, InstanceAnnotation, LevelRanges, ResolvePolicy, SampleAssignment, Strategy,
    AMBIGUOUS_LABEL,
};
use crate::error::{Error, Result};
use crate::io::{
    generate_synthetic, load_annotations, load_detections, load_results, save_annotations,
    save_detections, save_overlay, save_results, OverlayItem, ResultFile, ResultFrame, ResultItem,
    SequenceFile, SyntheticConfig,
};
use crate::mask::{inner_center, mask_bbox, mask_centroid};
use crate::metrics::{accumulate_mots, dataset_stats, ComplexityStats, MotsCounts, MotsReport};
use crate::track::{select_top_k, CostWeights, Detection, Tracker, TrackerConfig};

use super::{AssignArgs, EvalArgs, InnerCenterArgs, StatsArgs, SynthArgs, TrackArgs};

fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::InsideBox => "inside-box",
        Strategy::CenterBox => "center-box",
        Strategy::CentroidMask => "centroid-mask",
        Strategy::InnerCenter => "inner-center",
    }
}

fn policy_name(p: ResolvePolicy) -> &'static str {
    match p {
        ResolvePolicy::ToNegative => "to-negative",
        ResolvePolicy::SmallestArea => "smallest-area",
    }
}

/// Writes `text` to `path` when given, else to `out`; either way the bytes
/// are identical.
fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Tabulates, per instance, the box center, the mask centroid, and the
/// inner center, each with a flag saying whether it lands on the mask.
pub fn cmd_inner_center(args: &InnerCenterArgs, out: &mut dyn Write) -> Result<()> {
    let seq = load_annotations(&args.annotations)?;
    let mut table = String::new();
    table.push_str(
        "frame\tid\tbox_cx\tbox_cy\tbox_inside\t\
         centroid_x\tcentroid_y\tcentroid_inside\t\
         inner_x\tinner_y\tinner_inside\n",
    );
    for fr in &seq.frames {
        for (id, mask) in &fr.items {
            let bbox = mask_bbox(mask)?;
            let (bcx, bcy) = bbox.center();
            let box_inside = mask.get(bcx.floor() as u32, bcy.floor() as u32);
            let centroid = mask_centroid(mask)?;
            let centroid_inside = mask.get(centroid.x, centroid.y);
            let inner = inner_center(mask, args.k, args.seed)?;
            let inner_inside = mask.get(inner.x, inner.y);
            writeln!(
                table,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                fr.frame,
                id,
                bcx,
                bcy,
                u8::from(box_inside),
                centroid.x,
                centroid.y,
                u8::from(centroid_inside),
                inner.x,
                inner.y,
                u8::from(inner_inside),
            )
            .expect("writing to a string cannot fail");
        }
    }
    emit(&table, args.output.as_deref(), out)
}

fn parse_level_ranges(spec: &str) -> Result<LevelRanges> {
    let bounds: Vec<u32> = spec
        .split(',')
        .map(|t| {
            t.trim().parse().map_err(|_| {
                Error::InvalidConfig(format!("level bound {t:?} is not a positive integer"))
            })
        })
        .collect::<Result<_>>()?;
    LevelRanges::new(bounds)
}

/// Per-strategy accumulators across all frames and levels.
#[derive(Default)]
struct AssignTally {
    positives: u64,
    ambiguous: u64,
    inside: u64,
    total: u64,
}

impl AssignTally {
    fn row(&self, name: &str) -> String {
        let fraction = if self.total == 0 {
            "-".to_string()
        } else {
            format!("{:.6}", self.inside as f64 / self.total as f64)
        };
        format!(
            "{name}\t{}\t{}\t{fraction}\n",
            self.positives, self.ambiguous
        )
    }

    /// Folds one resolved level in: positive count and, when there are
    /// positives, the inside/outside split.
    fn add_level(
        &mut self,
        resolved: &SampleAssignment,
        instances: &[InstanceAnnotation],
    ) -> Result<()> {
        let positives = resolved.positive_cells();
        self.positives += positives.len() as u64;
        if !positives.is_empty() {
            let report = inside_mask_fraction(resolved, instances)?;
            self.inside += report.inside_count as u64;
            self.total += (report.inside_count + report.outside_count) as u64;
        }
        Ok(())
    }
}

/// Runs every assignment strategy over the sequence and prints a comparison
/// table (positives, pre-resolution ambiguous cells, inside-mask fraction,
/// all micro-averaged over frames and levels). With `--mix` an extra row
/// shows the chosen strategy's positives augmented by a percentage of
/// another strategy's. With `--output` the chosen strategy's resolved
/// labels are dumped as JSON.
pub fn cmd_assign(args: &AssignArgs, out: &mut dyn Write) -> Result<()> {
    const ALL: [Strategy; 4] = [
        Strategy::InsideBox,
        Strategy::CenterBox,
        Strategy::CentroidMask,
        Strategy::InnerCenter,
    ];
    let seq = load_annotations(&args.annotations)?;
    let ranges = parse_level_ranges(&args.level_ranges)?;
    let grids = build_grids(seq.width, seq.height, args.base_stride)?;

    let mut tallies: Vec<AssignTally> = (0..ALL.len()).map(|_| AssignTally::default()).collect();
    let mut mix_tally = AssignTally::default();
    let mut dump_frames: Vec<Value> = Vec::new();

    for fr in &seq.frames {
        let instances: Vec<InstanceAnnotation> = fr
            .items
            .iter()
            .map(|(id, mask)| InstanceAnnotation::new(*id, mask.clone(), fr.frame))
            .collect::<Result<_>>()?;
        if instances.is_empty() {
            continue;
        }
        // Resolved assignments per strategy, kept so the mix row can reuse
        // them instead of assigning twice.
        let mut resolved_by_strategy: Vec<Vec<SampleAssignment>> = Vec::with_capacity(ALL.len());
        for (si, strat) in ALL.iter().enumerate() {
            let raw_levels = assign(&instances, &grids, &ranges, *strat, args.k, args.seed)?;
            let mut resolved_levels = Vec::with_capacity(raw_levels.len());
            let mut dump_levels: Vec<Value> = Vec::new();
            for raw in &raw_levels {
                let ambiguous = detect_ambiguous(raw);
                tallies[si].ambiguous += ambiguous.len() as u64;
                let resolved = resolve_ambiguous(raw, args.policy);
                tallies[si].add_level(&resolved, &instances)?;
                if *strat == args.strategy && args.output.is_some() {
                    let grid = resolved.grid();
                    dump_levels.push(json!({
                        "level": grid.level,
                        "stride": grid.stride,
                        "grid_width": grid.width,
                        "grid_height": grid.height,
                        "labels": resolved.labels(),
                        "ambiguous_cells": ambiguous
                            .iter()
                            .map(|c| json!({"cx": c.cx, "cy": c.cy, "ids": c.ids}))
                            .collect::<Vec<_>>(),
                    }));
                }
                resolved_levels.push(resolved);
            }
            if *strat == args.strategy && args.output.is_some() {
                dump_frames.push(json!({"frame": fr.frame, "levels": dump_levels}));
            }
            resolved_by_strategy.push(resolved_levels);
        }
        if let Some(percent) = args.mix {
            let base_idx = ALL.iter().position(|s| *s == args.strategy).unwrap();
            let other_idx = ALL.iter().position(|s| *s == args.mix_with).unwrap();
            let base_levels = &resolved_by_strategy[base_idx];
            let other_levels = &resolved_by_strategy[other_idx];
            for (base, other) in base_levels.iter().zip(other_levels) {
                let mixed = mix_positive_sets(base, other, percent, args.seed)?;
                mix_tally.ambiguous += mixed
                    .labels()
                    .iter()
                    .filter(|&&l| l == AMBIGUOUS_LABEL)
                    .count() as u64;
                mix_tally.add_level(&mixed, &instances)?;
            }
        }
    }

    let mut table = String::from("strategy\tpositives\tambiguous\tinside_fraction\n");
    for (si, strat) in ALL.iter().enumerate() {
        table.push_str(&tallies[si].row(strategy_name(*strat)));
    }
    if let Some(percent) = args.mix {
        let name = format!(
            "mixed({}+{percent}%-of-{})",
            strategy_name(args.strategy),
            strategy_name(args.mix_with)
        );
        table.push_str(&mix_tally.row(&name));
    }
    out.write_all(table.as_bytes())?;

    if let Some(path) = &args.output {
        let dump = json!({
            "video_id": seq.video_id,
            "strategy": strategy_name(args.strategy),
            "policy": policy_name(args.policy),
            "k": args.k,
            "seed": args.seed,
            "base_stride": args.base_stride,
            "level_bounds": ranges.bounds(),
            "frames": dump_frames,
        });
        let mut text = serde_json::to_string_pretty(&dump).expect("dump serializes");
        text.push('\n');
        fs::write(path, text)?;
    }
    Ok(())
}

/// What [`cmd_track`] did, for status reporting.
#[derive(Debug, Clone, Copy)]
pub struct TrackOutcome {
    /// Frames written (the full first..=last detection frame range).
    pub frames: u64,
    /// Detections read from the input file.
    pub detections_in: usize,
    /// Detections surviving score filtering and the per-frame cap.
    pub detections_kept: usize,
    /// Distinct identities ever opened.
    pub identities: u32,
}

/// Associates a detection stream into identities and writes a results file
/// covering every frame from the first to the last detection frame
/// (inclusive), including frames with no output. Optionally renders one
/// overlay image per frame.
pub fn cmd_track(args: &TrackArgs) -> Result<TrackOutcome> {
    let file = load_detections(&args.detections)?;
    let video_id = file.video_id.clone();
    let (width, height) = (file.width, file.height);
    let detections_in = file.detections.len();

    let config = TrackerConfig {
        weights: CostWeights {
            w_emb: args.w_emb,
            w_iou: args.w_iou,
        },
        gate: args.gate,
        max_age: args.max_age,
        ema_alpha: args.ema_alpha,
        spawn_score: args.spawn_score,
        ..TrackerConfig::default()
    };
    let mut tracker = Tracker::new(config)?;

    let mut by_frame: BTreeMap<u32, Vec<Detection>> = BTreeMap::new();
    for det in file.detections {
        by_frame.entry(det.frame).or_default().push(det);
    }

    if let Some(dir) = &args.overlay_dir {
        fs::create_dir_all(dir)?;
    }

    let mut frames_out: Vec<ResultFrame> = Vec::new();
    let mut detections_kept = 0usize;
    let mut identities = 0u32;
    if let (Some(&first), Some(&last)) = (by_frame.keys().next(), by_frame.keys().next_back()) {
        for frame in first..=last {
            let frame_dets = by_frame.get(&frame).map(Vec::as_slice).unwrap_or(&[]);
            let kept = select_top_k(frame_dets, args.top_k, args.score_thresh);
            detections_kept += kept.len();
            let matched = if tracker.is_initialized() {
                tracker.match_frame(&kept)?
            } else {
                tracker.init(&kept)
            };
            let mut items: Vec<ResultItem> = matched
                .into_iter()
                .map(|(det_idx, id)| ResultItem {
                    id,
                    bbox: kept[det_idx].bbox,
                    mask: kept[det_idx].mask.clone(),
                })
                .collect();
            items.sort_by_key(|item| item.id);
            if let Some(last_item) = items.last() {
                identities = identities.max(last_item.id);
            }
            if let Some(dir) = &args.overlay_dir {
                let overlay_items: Vec<OverlayItem> = items
                    .iter()
                    .map(|item| OverlayItem {
                        id: item.id,
                        mask: item.mask.clone(),
                        bbox: Some(item.bbox),
                    })
                    .collect();
                save_overlay(
                    dir.join(format!("frame-{frame:06}.ppm")),
                    width,
                    height,
                    &overlay_items,
                    args.seed,
                )?;
            }
            frames_out.push(ResultFrame { frame, items });
        }
    }

    let frames = frames_out.len() as u64;
    save_results(
        &args.output,
        &ResultFile {
            video_id,
            width,
            height,
            frames: frames_out,
        },
    )?;
    Ok(TrackOutcome {
        frames,
        detections_in,
        detections_kept,
        identities,
    })
}

fn report_line(label: &str, report: &MotsReport) -> String {
    format!(
        "{label}\tsmotsa={:.6}\tmotsa={:.6}\tmotsp={:.6}\ttp={}\tfp={}\tfn={}\tids={}\tsoft_tp={:.6}\tgt={}\n",
        report.smotsa,
        report.motsa,
        report.motsp,
        report.true_positives,
        report.false_positives,
        report.false_negatives,
        report.id_switches,
        report.soft_tp,
        report.gt_total,
    )
}

/// Runs a deterministic, possibly parallel map over `inputs`, returning
/// outputs in input order; the first error in input order wins.
fn ordered_parallel<T, U, F>(inputs: &[T], jobs: usize, f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Send + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let results: Vec<Result<U>> = pool.install(|| inputs.par_iter().map(f).collect());
    results.into_iter().collect()
}

/// Scores result files against ground truth matched by video id, printing a
/// per-video line, an aggregate line, and a final machine-readable JSON
/// line of the aggregate report.
pub fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<MotsReport> {
    let mut gt_by_video: BTreeMap<String, SequenceFile> = BTreeMap::new();
    for path in &args.annotations {
        let seq = load_annotations(path)?;
        let video_id = seq.video_id.clone();
        if gt_by_video.insert(video_id.clone(), seq).is_some() {
            return Err(Error::Schema(format!(
                "two annotation files describe video {video_id:?}"
            )));
        }
    }
    let mut result_files: Vec<ResultFile> = Vec::with_capacity(args.results.len());
    for path in &args.results {
        result_files.push(load_results(path)?);
    }
    let mut pairs: Vec<(&ResultFile, &SequenceFile)> = Vec::with_capacity(result_files.len());
    for res in &result_files {
        if pairs.iter().any(|(r, _)| r.video_id == res.video_id) {
            return Err(Error::Schema(format!(
                "two result files describe video {:?}",
                res.video_id
            )));
        }
        let gt = gt_by_video.get(&res.video_id).ok_or_else(|| {
            Error::Schema(format!("no annotations given for video {:?}", res.video_id))
        })?;
        if (res.width, res.height) != (gt.width, gt.height) {
            return Err(Error::DimensionMismatch(format!(
                "video {:?}: results are {}x{} but annotations are {}x{}",
                res.video_id, res.width, res.height, gt.width, gt.height
            )));
        }
        pairs.push((res, gt));
    }

    let counts: Vec<MotsCounts> = ordered_parallel(&pairs, args.jobs, |(res, gt)| {
        accumulate_mots(&res.to_frame_results()?, &gt.frames, args.iou_thresh)
    })?;

    let mut aggregate = MotsCounts::default();
    let mut video_values: Vec<Value> = Vec::with_capacity(counts.len());
    for ((res, _), c) in pairs.iter().zip(&counts) {
        aggregate.add(c);
        let report = c.into_report()?;
        out.write_all(report_line(&format!("video {}", res.video_id), &report).as_bytes())?;
        let mut obj = serde_json::to_value(report)
            .expect("report serializes")
            .as_object()
            .cloned()
            .expect("report is an object");
        obj.insert("video_id".into(), json!(res.video_id));
        video_values.push(Value::Object(obj));
    }
    let aggregate_report = aggregate.into_report()?;
    out.write_all(report_line("aggregate", &aggregate_report).as_bytes())?;
    let json_line = serde_json::to_string(&aggregate_report).expect("report serializes");
    writeln!(out, "{json_line}")?;

    if let Some(path) = &args.output {
        let doc = json!({"aggregate": aggregate_report, "videos": video_values});
        let mut text = serde_json::to_string_pretty(&doc).expect("doc serializes");
        text.push('\n');
        fs::write(path, text)?;
    }
    Ok(aggregate_report)
}

/// Computes dataset complexity statistics over ground-truth sequences and
/// prints a small table plus a machine-readable JSON line.
pub fn cmd_stats(args: &StatsArgs, out: &mut dyn Write) -> Result<ComplexityStats> {
    let sequences: Vec<SequenceFile> =
        ordered_parallel(&args.annotations, args.jobs, |path| load_annotations(path))?;
    let dataset: Vec<_> = sequences.into_iter().map(|s| s.frames).collect();
    let stats = dataset_stats(
        &dataset,
        args.tiny_area,
        args.large_area,
        args.overlap_iou_min,
    )?;

    writeln!(
        out,
        "small_target_fraction\tinstance_count\toverlapping_count"
    )?;
    writeln!(
        out,
        "{:.6}\t{}\t{}",
        stats.small_target_fraction, stats.instance_count, stats.overlapping_count
    )?;
    let json_line = serde_json::to_string(&stats).expect("stats serialize");
    writeln!(out, "{json_line}")?;

    if let Some(path) = &args.output {
        let mut text = serde_json::to_string_pretty(&stats).expect("stats serialize");
        text.push('\n');
        fs::write(path, text)?;
    }
    Ok(stats)
}

/// What [`cmd_synth`] wrote, for status reporting.
#[derive(Debug, Clone, Copy)]
pub struct SynthOutcome {
    pub frames: usize,
    pub instances: u32,
    pub detections: usize,
}

/// Generates a synthetic scene and writes its ground-truth annotations and
/// detection stream.
pub fn cmd_synth(args: &SynthArgs) -> Result<SynthOutcome> {
    let config = SyntheticConfig {
        video_id: args.video_id.clone(),
        num_instances: args.num_instances,
        frames: args.frames,
        width: args.width,
        height: args.height,
        min_size: args.min_size,
        max_size: args.max_size,
        speed_min: args.speed_min,
        speed_max: args.speed_max,
        occlusions: args.occlusion.clone(),
        embedding_noise: args.embedding_noise,
        detection_noise: args.detection_noise,
        embedding_dim: args.embedding_dim,
        embedding_min_separation: args.embedding_min_separation,
        emit_masks: args.emit_masks,
        seed: args.seed,
    };
    let (ground_truth, detections) = generate_synthetic(&config)?;
    save_annotations(&args.annotations_out, &ground_truth)?;
    save_detections(&args.detections_out, &detections)?;
    Ok(SynthOutcome {
        frames: ground_truth.frames.len(),
        instances: args.num_instances,
        detections: detections.detections.len(),
    })
}
