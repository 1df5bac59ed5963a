//! Command-line front end. All subcommand logic lives in library functions
//! (see [`commands`]) so it can be driven from tests as well as from the
//! binary; `main` only parses flags and reports status.
//!
//! Determinism contract: identical flags and input files produce
//! byte-identical data output (stdout and written files). Status and error
//! text goes to stderr, where ANSI color is used only on a terminal and is
//! disabled entirely by the `NO_COLOR` environment variable — the only
//! environment influence on output.

mod commands;

use std::ffi::OsString;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde_json::{Map, Value};

use crate::assign::{ResolvePolicy, Strategy};
use crate::error::{Error, Result};
use crate::io::synth::OcclusionEvent;
use crate::loss::DEFAULT_EMBEDDING_DIM;
use crate::metrics::{DEFAULT_LARGE_AREA, DEFAULT_MATCH_IOU, DEFAULT_TINY_AREA};

pub use commands::{
    cmd_assign, cmd_eval, cmd_inner_center, cmd_stats, cmd_synth, cmd_track, SynthOutcome,
    TrackOutcome,
};

/// Seed used by every subcommand unless overridden.
pub const DEFAULT_SEED: u64 = 17;

/// Reproducible multi-object tracking experiments on instance masks:
/// sampling-center analysis, positive-sample assignment, tracking,
/// evaluation, dataset statistics, and synthetic scene generation.
#[derive(Debug, Parser)]
#[command(name = "segtrack", version, max_term_width = 100)]
pub struct Cli {
    /// JSON file of flag values (kebab-case keys) applied where the command
    /// line left the default; explicit flags always win. Input/output paths
    /// must be given as flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate box center, mask centroid, and inner center per instance,
    /// with an inside-the-mask flag for each.
    InnerCenter(InnerCenterArgs),
    /// Compare positive-sample assignment strategies on multi-level grids:
    /// positives, ambiguous cells, and inside-mask fractions.
    Assign(AssignArgs),
    /// Associate detections across frames into identities and write a
    /// results file (optionally with per-frame overlay images).
    Track(TrackArgs),
    /// Score results against ground truth (sMOTSA / MOTSA / MOTSP).
    Eval(EvalArgs),
    /// Dataset complexity statistics over ground-truth sequences.
    Stats(StatsArgs),
    /// Generate a synthetic scene: annotations plus a detection stream.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InnerCenterArgs {
    /// Annotation file to analyze.
    #[arg(long, value_name = "FILE")]
    pub annotations: PathBuf,
    /// Number of edge points sampled for the inner center.
    #[arg(long, default_value_t = 64)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the table here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AssignArgs {
    /// Annotation file to assign.
    #[arg(long, value_name = "FILE")]
    pub annotations: PathBuf,
    /// Strategy used for the dump and as the mixing base; the summary table
    /// always covers all strategies.
    #[arg(long, value_enum, default_value_t = Strategy::InnerCenter)]
    pub strategy: Strategy,
    /// How ambiguous cells are resolved.
    #[arg(long, value_enum, default_value_t = ResolvePolicy::ToNegative)]
    pub policy: ResolvePolicy,
    /// Number of edge points sampled for inner centers.
    #[arg(long, default_value_t = 64)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Stride of the finest feature level; coarser levels double it.
    #[arg(long, default_value_t = 8)]
    pub base_stride: u32,
    /// Comma-separated upper bounds (in pixels of box side) routing
    /// instances to levels; one fewer than the number of levels.
    #[arg(long, default_value = "64,128")]
    pub level_ranges: String,
    /// Augment the chosen strategy's positives with this percentage of
    /// another strategy's positives (0–100 in steps of 10).
    #[arg(long, value_name = "PERCENT")]
    pub mix: Option<u32>,
    /// Strategy supplying the mixed-in positives.
    #[arg(long, value_enum, default_value_t = Strategy::CenterBox)]
    pub mix_with: Strategy,
    /// Write a per-level label dump (JSON) here.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TrackArgs {
    /// Detection file to associate.
    #[arg(long, value_name = "FILE")]
    pub detections: PathBuf,
    /// Results file to write.
    #[arg(long, value_name = "FILE")]
    pub output: PathBuf,
    /// Weight of the appearance (embedding distance) cost term.
    #[arg(long, default_value_t = 0.7)]
    pub w_emb: f64,
    /// Weight of the geometry (1 − box IoU) cost term.
    #[arg(long, default_value_t = 0.3)]
    pub w_iou: f64,
    /// Costs above this never match.
    #[arg(long, default_value_t = 0.9)]
    pub gate: f64,
    /// Frames a track survives unmatched before removal.
    #[arg(long, default_value_t = 30)]
    pub max_age: u32,
    /// Kept mass of the old track embedding on each match.
    #[arg(long, default_value_t = 0.9)]
    pub ema_alpha: f64,
    /// Minimum detection score to open a new track.
    #[arg(long, default_value_t = 0.5)]
    pub spawn_score: f64,
    /// Keep at most this many detections per frame (highest scores).
    #[arg(long, default_value_t = 100)]
    pub top_k: usize,
    /// Drop detections scoring below this before matching.
    #[arg(long, default_value_t = 0.0)]
    pub score_thresh: f64,
    /// Write per-frame overlay images (binary pixmaps) into this directory.
    #[arg(long, value_name = "DIR")]
    pub overlay_dir: Option<PathBuf>,
    /// Palette seed for overlay colors.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Results file(s); repeat the flag for several videos.
    #[arg(long, required = true, value_name = "FILE")]
    pub results: Vec<PathBuf>,
    /// Annotation file(s); matched to results by video id.
    #[arg(long, required = true, value_name = "FILE")]
    pub annotations: Vec<PathBuf>,
    /// A prediction matches ground truth only above this mask IoU.
    #[arg(long, default_value_t = DEFAULT_MATCH_IOU)]
    pub iou_thresh: f64,
    /// Worker threads for multi-video evaluation (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Write the machine-readable report here as well.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    /// Annotation file(s) forming the dataset.
    #[arg(long, required = true, value_name = "FILE")]
    pub annotations: Vec<PathBuf>,
    /// Mask areas below this count as tiny.
    #[arg(long, default_value_t = DEFAULT_TINY_AREA)]
    pub tiny_area: u64,
    /// Mask areas above this count as large.
    #[arg(long, default_value_t = DEFAULT_LARGE_AREA)]
    pub large_area: u64,
    /// Two instances overlap when their mask IoU exceeds this.
    #[arg(long, default_value_t = 0.0)]
    pub overlap_iou_min: f64,
    /// Worker threads for loading (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Write the machine-readable statistics here as well.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Ground-truth annotation file to write.
    #[arg(long, value_name = "FILE")]
    pub annotations_out: PathBuf,
    /// Detection file to write.
    #[arg(long, value_name = "FILE")]
    pub detections_out: PathBuf,
    #[arg(long, default_value = "synth")]
    pub video_id: String,
    #[arg(long, default_value_t = 3)]
    pub num_instances: u32,
    #[arg(long, default_value_t = 30)]
    pub frames: u32,
    #[arg(long, default_value_t = 192)]
    pub width: u32,
    #[arg(long, default_value_t = 128)]
    pub height: u32,
    /// Smallest shape extent, in pixels.
    #[arg(long, default_value_t = 16)]
    pub min_size: u32,
    /// Largest shape extent, in pixels.
    #[arg(long, default_value_t = 40)]
    pub max_size: u32,
    /// Slowest per-axis speed, in pixels per frame.
    #[arg(long, default_value_t = 0.5)]
    pub speed_min: f64,
    /// Fastest per-axis speed, in pixels per frame.
    #[arg(long, default_value_t = 2.5)]
    pub speed_max: f64,
    /// Occlusion window `id:start:end[:hide]`: the instance goes undetected
    /// in frames start..=end; with `:hide` it also leaves the ground truth.
    /// Repeat the flag for several windows.
    #[arg(long = "occlusion", value_name = "SPEC", value_parser = parse_occlusion)]
    pub occlusion: Vec<OcclusionEvent>,
    /// Standard deviation of Gaussian embedding noise.
    #[arg(long, default_value_t = 0.0)]
    pub embedding_noise: f64,
    /// Standard deviation of Gaussian box-edge jitter, in pixels.
    #[arg(long, default_value_t = 0.0)]
    pub detection_noise: f64,
    #[arg(long, default_value_t = DEFAULT_EMBEDDING_DIM)]
    pub embedding_dim: usize,
    /// Minimum pairwise distance between instance base embeddings.
    #[arg(long, default_value_t = 1.0)]
    pub embedding_min_separation: f64,
    /// Attach exact visible masks to detections (`--emit-masks false` for
    /// box-only detections).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set, num_args = 1, value_name = "BOOL")]
    pub emit_masks: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

/// Parses `id:start:end[:hide]` into an occlusion window.
fn parse_occlusion(s: &str) -> std::result::Result<OcclusionEvent, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 && parts.len() != 4 {
        return Err(format!("{s:?} is not id:start:end[:hide]"));
    }
    let num = |t: &str, what: &str| {
        t.parse::<u32>()
            .map_err(|_| format!("{what} {t:?} is not a non-negative integer"))
    };
    let hide_in_gt = match parts.get(3) {
        None => false,
        Some(&"hide") => true,
        Some(other) => {
            return Err(format!(
                "trailing field {other:?}; only \"hide\" is allowed"
            ))
        }
    };
    Ok(OcclusionEvent {
        instance_id: num(parts[0], "instance id")?,
        start: num(parts[1], "start frame")?,
        end: num(parts[2], "end frame")?,
        hide_in_gt,
    })
}

/// Entry point used by the binary: parses `argv`, applies `--config`, runs
/// the subcommand, and reports status. Returns the process exit code.
pub fn run_from<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match run(cli, &matches) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("{} {err}", paint("error:", "1;31"));
            1
        }
    }
}

/// Wraps `text` in an ANSI style for terminal stderr; plain text when
/// stderr is piped or `NO_COLOR` is set.
fn paint(text: &str, style: &str) -> String {
    let colored = std::env::var_os("NO_COLOR").is_none() && std::io::stderr().is_terminal();
    if colored {
        format!("\x1b[{style}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

fn status(msg: &str) {
    eprintln!("{}", paint(msg, "32"));
}

fn run(mut cli: Cli, matches: &ArgMatches) -> Result<()> {
    let config = match &cli.config {
        Some(path) => Some(load_config(path)?),
        None => None,
    };
    let sub = matches
        .subcommand()
        .map(|(_, m)| m)
        .expect("subcommand is required");
    let stdout = std::io::stdout();
    match &mut cli.command {
        Command::InnerCenter(args) => {
            if let Some(cfg) = &config {
                merge_inner_center(args, sub, cfg)?;
            }
            cmd_inner_center(args, &mut stdout.lock())?;
            if let Some(path) = &args.output {
                status(&format!("wrote center table to {}", path.display()));
            }
        }
        Command::Assign(args) => {
            if let Some(cfg) = &config {
                merge_assign(args, sub, cfg)?;
            }
            cmd_assign(args, &mut stdout.lock())?;
            if let Some(path) = &args.output {
                status(&format!("wrote assignment dump to {}", path.display()));
            }
        }
        Command::Track(args) => {
            if let Some(cfg) = &config {
                merge_track(args, sub, cfg)?;
            }
            let outcome = cmd_track(args)?;
            status(&format!(
                "tracked {} of {} detections over {} frames into {} identities; wrote {}",
                outcome.detections_kept,
                outcome.detections_in,
                outcome.frames,
                outcome.identities,
                args.output.display()
            ));
        }
        Command::Eval(args) => {
            if let Some(cfg) = &config {
                merge_eval(args, sub, cfg)?;
            }
            cmd_eval(args, &mut stdout.lock())?;
            if let Some(path) = &args.output {
                status(&format!("wrote evaluation report to {}", path.display()));
            }
        }
        Command::Stats(args) => {
            if let Some(cfg) = &config {
                merge_stats(args, sub, cfg)?;
            }
            cmd_stats(args, &mut stdout.lock())?;
            if let Some(path) = &args.output {
                status(&format!("wrote statistics to {}", path.display()));
            }
        }
        Command::Synth(args) => {
            if let Some(cfg) = &config {
                merge_synth(args, sub, cfg)?;
            }
            let outcome = cmd_synth(args)?;
            status(&format!(
                "wrote {} ({} frames, {} instances) and {} ({} detections)",
                args.annotations_out.display(),
                outcome.frames,
                outcome.instances,
                args.detections_out.display(),
                outcome.detections
            ));
        }
    }
    Ok(())
}

fn load_config(path: &Path) -> Result<Map<String, Value>> {
    let text = crate::io::read_file(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: e.line(),
        msg: e.to_string(),
    })?;
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(Error::Schema(
            "config file must be a JSON object of flag values".into(),
        )),
    }
}

/// Overwrites `field` from config key `key` unless the flag was given on
/// the command line.
fn merge_field<T: serde::de::DeserializeOwned>(
    field: &mut T,
    matches: &ArgMatches,
    cfg: &Map<String, Value>,
    key: &str,
) -> Result<()> {
    let id = key.replace('-', "_");
    if matches.value_source(&id) == Some(ValueSource::CommandLine) {
        return Ok(());
    }
    if let Some(value) = cfg.get(key) {
        *field = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidConfig(format!("config key {key:?}: {e}")))?;
    }
    Ok(())
}

/// Rejects config keys outside `known` so typos fail loudly; path flags are
/// deliberately not mergeable.
fn check_config_keys(cfg: &Map<String, Value>, known: &[&str], paths: &[&str]) -> Result<()> {
    for key in cfg.keys() {
        if paths.contains(&key.as_str()) {
            return Err(Error::InvalidConfig(format!(
                "config key {key:?} is a file path; pass it as a flag"
            )));
        }
        if !known.contains(&key.as_str()) {
            return Err(Error::InvalidConfig(format!(
                "config key {key:?} is not recognized for this subcommand"
            )));
        }
    }
    Ok(())
}

fn merge_inner_center(
    args: &mut InnerCenterArgs,
    m: &ArgMatches,
    cfg: &Map<String, Value>,
) -> Result<()> {
    check_config_keys(cfg, &["k", "seed"], &["annotations", "output"])?;
    merge_field(&mut args.k, m, cfg, "k")?;
    merge_field(&mut args.seed, m, cfg, "seed")
}

fn merge_assign(args: &mut AssignArgs, m: &ArgMatches, cfg: &Map<String, Value>) -> Result<()> {
    check_config_keys(
        cfg,
        &[
            "strategy",
            "policy",
            "k",
            "seed",
            "base-stride",
            "level-ranges",
            "mix",
            "mix-with",
        ],
        &["annotations", "output"],
    )?;
    merge_field(&mut args.strategy, m, cfg, "strategy")?;
    merge_field(&mut args.policy, m, cfg, "policy")?;
    merge_field(&mut args.k, m, cfg, "k")?;
    merge_field(&mut args.seed, m, cfg, "seed")?;
    merge_field(&mut args.base_stride, m, cfg, "base-stride")?;
    merge_field(&mut args.level_ranges, m, cfg, "level-ranges")?;
    merge_field(&mut args.mix, m, cfg, "mix")?;
    merge_field(&mut args.mix_with, m, cfg, "mix-with")
}

fn merge_track(args: &mut TrackArgs, m: &ArgMatches, cfg: &Map<String, Value>) -> Result<()> {
    check_config_keys(
        cfg,
        &[
            "w-emb",
            "w-iou",
            "gate",
            "max-age",
            "ema-alpha",
            "spawn-score",
            "top-k",
            "score-thresh",
            "seed",
        ],
        &["detections", "output", "overlay-dir"],
    )?;
    merge_field(&mut args.w_emb, m, cfg, "w-emb")?;
    merge_field(&mut args.w_iou, m, cfg, "w-iou")?;
    merge_field(&mut args.gate, m, cfg, "gate")?;
    merge_field(&mut args.max_age, m, cfg, "max-age")?;
    merge_field(&mut args.ema_alpha, m, cfg, "ema-alpha")?;
    merge_field(&mut args.spawn_score, m, cfg, "spawn-score")?;
    merge_field(&mut args.top_k, m, cfg, "top-k")?;
    merge_field(&mut args.score_thresh, m, cfg, "score-thresh")?;
    merge_field(&mut args.seed, m, cfg, "seed")
}

fn merge_eval(args: &mut EvalArgs, m: &ArgMatches, cfg: &Map<String, Value>) -> Result<()> {
    check_config_keys(
        cfg,
        &["iou-thresh", "jobs"],
        &["results", "annotations", "output"],
    )?;
    merge_field(&mut args.iou_thresh, m, cfg, "iou-thresh")?;
    merge_field(&mut args.jobs, m, cfg, "jobs")
}

fn merge_stats(args: &mut StatsArgs, m: &ArgMatches, cfg: &Map<String, Value>) -> Result<()> {
    check_config_keys(
        cfg,
        &["tiny-area", "large-area", "overlap-iou-min", "jobs"],
        &["annotations", "output"],
    )?;
    merge_field(&mut args.tiny_area, m, cfg, "tiny-area")?;
    merge_field(&mut args.large_area, m, cfg, "large-area")?;
    merge_field(&mut args.overlap_iou_min, m, cfg, "overlap-iou-min")?;
    merge_field(&mut args.jobs, m, cfg, "jobs")
}

fn merge_synth(args: &mut SynthArgs, m: &ArgMatches, cfg: &Map<String, Value>) -> Result<()> {
    check_config_keys(
        cfg,
        &[
            "video-id",
            "num-instances",
            "frames",
            "width",
            "height",
            "min-size",
            "max-size",
            "speed-min",
            "speed-max",
            "occlusion",
            "embedding-noise",
            "detection-noise",
            "embedding-dim",
            "embedding-min-separation",
            "emit-masks",
            "seed",
        ],
        &["annotations-out", "detections-out"],
    )?;
    merge_field(&mut args.video_id, m, cfg, "video-id")?;
    merge_field(&mut args.num_instances, m, cfg, "num-instances")?;
    merge_field(&mut args.frames, m, cfg, "frames")?;
    merge_field(&mut args.width, m, cfg, "width")?;
    merge_field(&mut args.height, m, cfg, "height")?;
    merge_field(&mut args.min_size, m, cfg, "min-size")?;
    merge_field(&mut args.max_size, m, cfg, "max-size")?;
    merge_field(&mut args.speed_min, m, cfg, "speed-min")?;
    merge_field(&mut args.speed_max, m, cfg, "speed-max")?;
    merge_field(&mut args.embedding_noise, m, cfg, "embedding-noise")?;
    merge_field(&mut args.detection_noise, m, cfg, "detection-noise")?;
    merge_field(&mut args.embedding_dim, m, cfg, "embedding-dim")?;
    merge_field(
        &mut args.embedding_min_separation,
        m,
        cfg,
        "embedding-min-separation",
    )?;
    merge_field(&mut args.emit_masks, m, cfg, "emit-masks")?;
    merge_field(&mut args.seed, m, cfg, "seed")?;
    // Occlusion windows use the same `id:start:end[:hide]` strings as the
    // flag, so they are parsed here rather than deserialized.
    if m.value_source("occlusion") != Some(ValueSource::CommandLine) {
        if let Some(value) = cfg.get("occlusion") {
            let specs: Vec<String> = serde_json::from_value(value.clone())
                .map_err(|e| Error::InvalidConfig(format!("config key \"occlusion\": {e}")))?;
            let mut events = Vec::with_capacity(specs.len());
            for spec in &specs {
                events.push(
                    parse_occlusion(spec).map_err(|e| {
                        Error::InvalidConfig(format!("config key \"occlusion\": {e}"))
                    })?,
                );
            }
            args.occlusion = events;
        }
    }
    Ok(())
}
