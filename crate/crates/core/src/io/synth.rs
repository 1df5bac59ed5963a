//! Deterministic synthetic scenes: shapes moving with constant velocity and
//! boundary reflection, occluding each other by a fixed z-order, with
//! scripted occlusion windows and configurable detection/embedding noise.
//! Used to exercise assignment, tracking, and evaluation end to end without
//! a trained detector.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::io::annotations::SequenceFile;
use crate::io::detections::DetectionFile;
use crate::loss::{Embedding, DEFAULT_EMBEDDING_DIM};
use crate::mask::{mask_bbox, BinaryMask, BoundingBox};
use crate::metrics::FrameResult;
use crate::track::Detection;

/// A window of frames (`start..=end`) in which one instance is undetectable.
/// With `hide_in_gt` it also disappears from the ground truth (a full
/// occlusion); otherwise the ground truth keeps it (a detector miss).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OcclusionEvent {
    pub instance_id: u32,
    pub start: u32,
    pub end: u32,
    pub hide_in_gt: bool,
}

/// Scene recipe. Everything downstream is a pure function of this struct.
#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    pub video_id: String,
    pub num_instances: u32,
    pub frames: u32,
    pub width: u32,
    pub height: u32,
    /// Shape extents are drawn uniformly from `[min_size, max_size]`.
    pub min_size: u32,
    pub max_size: u32,
    /// Per-axis speed magnitudes are drawn uniformly from
    /// `[speed_min, speed_max]` pixels per frame.
    pub speed_min: f64,
    pub speed_max: f64,
    pub occlusions: Vec<OcclusionEvent>,
    /// Standard deviation of Gaussian noise added per embedding component.
    pub embedding_noise: f64,
    /// Standard deviation of Gaussian jitter added to detection box edges,
    /// in pixels. Masks are never jittered.
    pub detection_noise: f64,
    pub embedding_dim: usize,
    /// Minimum pairwise L2 distance between base embeddings.
    pub embedding_min_separation: f64,
    /// Attach the exact visible mask to each detection.
    pub emit_masks: bool,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            video_id: "synth".into(),
            num_instances: 3,
            frames: 30,
            width: 192,
            height: 128,
            min_size: 16,
            max_size: 40,
            speed_min: 0.5,
            speed_max: 2.5,
            occlusions: Vec::new(),
            embedding_noise: 0.0,
            detection_noise: 0.0,
            embedding_dim: DEFAULT_EMBEDDING_DIM,
            embedding_min_separation: 1.0,
            emit_masks: true,
            seed: 17,
        }
    }
}

impl SyntheticConfig {
    fn validate(&self) -> Result<()> {
        if self.width < 32 || self.height < 32 {
            return Err(Error::InvalidConfig(format!(
                "scene dims {}x{} must be at least 32x32",
                self.width, self.height
            )));
        }
        if self.num_instances == 0 {
            return Err(Error::InvalidConfig("need at least one instance".into()));
        }
        if self.frames == 0 {
            return Err(Error::InvalidConfig("need at least one frame".into()));
        }
        if self.min_size == 0 || self.min_size > self.max_size {
            return Err(Error::InvalidConfig(format!(
                "shape size range [{}, {}] is invalid",
                self.min_size, self.max_size
            )));
        }
        if self.max_size > self.width.min(self.height) {
            return Err(Error::InvalidConfig(format!(
                "max shape size {} exceeds the smaller scene dim {}",
                self.max_size,
                self.width.min(self.height)
            )));
        }
        if !self.speed_min.is_finite()
            || !self.speed_max.is_finite()
            || self.speed_min < 0.0
            || self.speed_min > self.speed_max
        {
            return Err(Error::InvalidConfig(format!(
                "speed range [{}, {}] is invalid",
                self.speed_min, self.speed_max
            )));
        }
        if !self.embedding_noise.is_finite() || self.embedding_noise < 0.0 {
            return Err(Error::InvalidConfig("embedding noise must be >= 0".into()));
        }
        if !self.detection_noise.is_finite() || self.detection_noise < 0.0 {
            return Err(Error::InvalidConfig("detection noise must be >= 0".into()));
        }
        if self.embedding_dim == 0 {
            return Err(Error::InvalidConfig(
                "embedding_dim must be positive".into(),
            ));
        }
        if !self.embedding_min_separation.is_finite() || self.embedding_min_separation < 0.0 {
            return Err(Error::InvalidConfig(
                "embedding separation must be >= 0".into(),
            ));
        }
        for ev in &self.occlusions {
            if ev.instance_id == 0 || ev.instance_id > self.num_instances {
                return Err(Error::InvalidConfig(format!(
                    "occlusion names instance {} of {}",
                    ev.instance_id, self.num_instances
                )));
            }
            if ev.start > ev.end {
                return Err(Error::InvalidConfig(format!(
                    "occlusion window [{}, {}] is inverted",
                    ev.start, ev.end
                )));
            }
        }
        Ok(())
    }

    fn occluded(&self, id: u32, frame: u32, in_gt: bool) -> bool {
        self.occlusions.iter().any(|ev| {
            ev.instance_id == id
                && (ev.start..=ev.end).contains(&frame)
                && (!in_gt || ev.hide_in_gt)
        })
    }
}

#[derive(Clone, Copy)]
enum Shape {
    Rect,
    Ellipse,
}

struct Actor {
    shape: Shape,
    size: (u32, u32),
    pos: (f64, f64),
    vel: (f64, f64),
    embedding: Vec<f64>,
}

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Separated base embeddings, retried against all prior ones.
fn base_embeddings(rng: &mut ChaCha8Rng, cfg: &SyntheticConfig) -> Result<Vec<Vec<f64>>> {
    let mut bases: Vec<Vec<f64>> = Vec::with_capacity(cfg.num_instances as usize);
    for _ in 0..cfg.num_instances {
        let mut attempts = 0;
        let v = loop {
            let candidate = unit_vector(rng, cfg.embedding_dim);
            if bases
                .iter()
                .all(|b| l2(b, &candidate) >= cfg.embedding_min_separation)
            {
                break candidate;
            }
            attempts += 1;
            if attempts >= 1000 {
                return Err(Error::InvalidConfig(format!(
                    "could not separate {} embeddings by {} in {} dims",
                    cfg.num_instances, cfg.embedding_min_separation, cfg.embedding_dim
                )));
            }
        };
        bases.push(v);
    }
    Ok(bases)
}

/// Reflects `pos` into `[0, max]`, flipping velocity on each bounce.
fn reflect(pos: &mut f64, vel: &mut f64, max: f64) {
    if max <= 0.0 {
        *pos = 0.0;
        *vel = 0.0;
        return;
    }
    while *pos < 0.0 || *pos > max {
        if *pos < 0.0 {
            *pos = -*pos;
            *vel = -*vel;
        } else {
            *pos = 2.0 * max - *pos;
            *vel = -*vel;
        }
    }
}

fn draw_shape(actor: &Actor, width: u32, height: u32) -> BinaryMask {
    let (sw, sh) = actor.size;
    let ox = actor.pos.0.round() as u32;
    let oy = actor.pos.1.round() as u32;
    let mut mask = BinaryMask::new(width, height).expect("validated dims");
    match actor.shape {
        Shape::Rect => {
            for y in oy..(oy + sh).min(height) {
                for x in ox..(ox + sw).min(width) {
                    mask.set(x, y, true);
                }
            }
        }
        Shape::Ellipse => {
            let cx = f64::from(ox) + f64::from(sw) / 2.0;
            let cy = f64::from(oy) + f64::from(sh) / 2.0;
            let rx = f64::from(sw) / 2.0;
            let ry = f64::from(sh) / 2.0;
            for y in oy..(oy + sh).min(height) {
                for x in ox..(ox + sw).min(width) {
                    let dx = (f64::from(x) + 0.5 - cx) / rx;
                    let dy = (f64::from(y) + 0.5 - cy) / ry;
                    if dx * dx + dy * dy <= 1.0 {
                        mask.set(x, y, true);
                    }
                }
            }
        }
    }
    mask
}

/// Gaussian-jitters one box edge coordinate and clamps it into `[lo, hi]`.
fn jitter(value: u32, sigma: f64, z: f64, lo: u32, hi: u32) -> u32 {
    let moved = (f64::from(value) + sigma * z).round();
    moved.clamp(f64::from(lo), f64::from(hi)) as u32
}

/// Generates a scene: ground-truth annotations plus a detection stream.
///
/// Instances are rectangles (odd ids) and ellipses (even ids) bouncing off
/// the scene borders. Higher ids occlude lower ids; each ground-truth mask
/// is the instance's visible region (empty masks are dropped). Scripted
/// occlusion windows remove an instance from the detections — and, when
/// `hide_in_gt`, from the ground truth. Identical configs produce
/// byte-identical files.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<(SequenceFile, DetectionFile)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let bases = base_embeddings(&mut rng, cfg)?;

    let mut actors: Vec<Actor> = Vec::with_capacity(cfg.num_instances as usize);
    for (i, embedding) in bases.into_iter().enumerate() {
        let sw = rng.random_range(cfg.min_size..=cfg.max_size);
        let sh = rng.random_range(cfg.min_size..=cfg.max_size);
        let max_x = f64::from(cfg.width - sw);
        let max_y = f64::from(cfg.height - sh);
        let sample_pos = |rng: &mut ChaCha8Rng, max: f64| {
            if max > 0.0 {
                rng.random_range(0.0..=max)
            } else {
                0.0
            }
        };
        let px = sample_pos(&mut rng, max_x);
        let py = sample_pos(&mut rng, max_y);
        let sample_vel = |rng: &mut ChaCha8Rng, max: f64| {
            if max <= 0.0 {
                return 0.0;
            }
            let mag = rng.random_range(cfg.speed_min..=cfg.speed_max);
            if rng.random::<bool>() {
                mag
            } else {
                -mag
            }
        };
        let vx = sample_vel(&mut rng, max_x);
        let vy = sample_vel(&mut rng, max_y);
        actors.push(Actor {
            shape: if i % 2 == 0 {
                Shape::Rect
            } else {
                Shape::Ellipse
            },
            size: (sw, sh),
            pos: (px, py),
            vel: (vx, vy),
            embedding,
        });
    }

    let mut gt_frames: Vec<FrameResult> = Vec::with_capacity(cfg.frames as usize);
    let mut detections: Vec<Detection> = Vec::new();
    for frame in 0..cfg.frames {
        let shapes: Vec<BinaryMask> = actors
            .iter()
            .map(|a| draw_shape(a, cfg.width, cfg.height))
            .collect();
        // Visibility under the fixed z-order: higher ids cover lower ids.
        let mut visible = shapes.clone();
        for (i, vis) in visible.iter_mut().enumerate() {
            for above in shapes.iter().skip(i + 1) {
                *vis = vis.difference(above)?;
            }
        }

        let mut items = Vec::new();
        for (i, vis) in visible.iter().enumerate() {
            let id = i as u32 + 1;
            if cfg.occluded(id, frame, true) || vis.is_empty() {
                continue;
            }
            items.push((id, vis.clone()));
        }
        gt_frames.push(FrameResult::new(frame, items)?);

        for (i, vis) in visible.iter().enumerate() {
            let id = i as u32 + 1;
            if cfg.occluded(id, frame, false) || vis.is_empty() {
                continue;
            }
            let tight = mask_bbox(vis)?;
            let score = 1.0 - 0.05 * rng.random::<f64>();
            let bbox = if cfg.detection_noise > 0.0 {
                let z: [f64; 4] = [
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                ];
                let x_min = jitter(tight.x_min, cfg.detection_noise, z[0], 0, cfg.width - 1);
                let y_min = jitter(tight.y_min, cfg.detection_noise, z[1], 0, cfg.height - 1);
                let x_max = jitter(tight.x_max, cfg.detection_noise, z[2], x_min + 1, cfg.width);
                let y_max = jitter(
                    tight.y_max,
                    cfg.detection_noise,
                    z[3],
                    y_min + 1,
                    cfg.height,
                );
                BoundingBox::new(x_min, y_min, x_max, y_max)?
            } else {
                tight
            };
            let mut values = actors[i].embedding.clone();
            if cfg.embedding_noise > 0.0 {
                for v in &mut values {
                    let z: f64 = rng.sample(StandardNormal);
                    *v += cfg.embedding_noise * z;
                }
            }
            detections.push(Detection::new(
                bbox,
                score,
                Embedding::new(values)?,
                cfg.emit_masks.then(|| vis.clone()),
                frame,
            )?);
        }

        for actor in &mut actors {
            let (sw, sh) = actor.size;
            actor.pos.0 += actor.vel.0;
            actor.pos.1 += actor.vel.1;
            reflect(
                &mut actor.pos.0,
                &mut actor.vel.0,
                f64::from(cfg.width - sw),
            );
            reflect(
                &mut actor.pos.1,
                &mut actor.vel.1,
                f64::from(cfg.height - sh),
            );
        }
    }

    // Identity consistency holds by construction; make it checkable.
    for fr in &gt_frames {
        for (id, _) in &fr.items {
            assert!(*id >= 1 && *id <= cfg.num_instances, "stable id range");
        }
    }

    Ok((
        SequenceFile {
            video_id: cfg.video_id.clone(),
            width: cfg.width,
            height: cfg.height,
            frames: gt_frames,
        },
        DetectionFile {
            video_id: cfg.video_id.clone(),
            width: cfg.width,
            height: cfg.height,
            embedding_dim: cfg.embedding_dim,
            detections,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::annotations::save_annotations;
    use crate::io::detections::save_detections;
    use tempfile::tempdir;

    #[test]
    fn zero_noise_detections_equal_ground_truth_boxes() {
        let cfg = SyntheticConfig {
            num_instances: 1,
            frames: 12,
            ..SyntheticConfig::default()
        };
        let (gt, dets) = generate_synthetic(&cfg).unwrap();
        assert_eq!(gt.frames.len(), 12);
        assert_eq!(dets.detections.len(), 12);
        for (fr, det) in gt.frames.iter().zip(&dets.detections) {
            assert_eq!(fr.items.len(), 1);
            assert_eq!(det.frame, fr.frame);
            assert_eq!(det.bbox, mask_bbox(&fr.items[0].1).unwrap());
            assert_eq!(det.mask.as_ref(), Some(&fr.items[0].1));
            assert!((0.95..=1.0).contains(&det.score));
        }
    }

    #[test]
    fn single_shape_keeps_its_area_while_bouncing() {
        let cfg = SyntheticConfig {
            num_instances: 1,
            frames: 400,
            width: 48,
            height: 40,
            min_size: 12,
            max_size: 12,
            speed_min: 3.0,
            speed_max: 5.0,
            ..SyntheticConfig::default()
        };
        let (gt, _) = generate_synthetic(&cfg).unwrap();
        for fr in &gt.frames {
            // A rectangle (id 1) never clips the border if reflection works.
            assert_eq!(fr.items[0].1.area(), 144, "frame {}", fr.frame);
        }
    }

    #[test]
    fn occlusion_window_removes_detections_inclusively() {
        let cfg = SyntheticConfig {
            num_instances: 2,
            frames: 20,
            occlusions: vec![OcclusionEvent {
                instance_id: 1,
                start: 10,
                end: 12,
                hide_in_gt: false,
            }],
            ..SyntheticConfig::default()
        };
        let (gt, dets) = generate_synthetic(&cfg).unwrap();
        for t in 10..=12 {
            assert!(
                !dets.detections.iter().any(|d| d.frame == t
                    && d.bbox == mask_bbox(&gt.frames[t as usize].items[0].1).unwrap()
                    && gt.frames[t as usize].items[0].0 == 1),
                "frame {t} should not detect instance 1"
            );
        }
        // Ground truth still contains instance 1 (a detector miss, not a
        // true disappearance).
        for t in 10..=12usize {
            assert!(gt.frames[t].items.iter().any(|(id, _)| *id == 1));
        }
    }

    #[test]
    fn hide_in_gt_also_removes_the_annotation() {
        let cfg = SyntheticConfig {
            num_instances: 1,
            frames: 8,
            occlusions: vec![OcclusionEvent {
                instance_id: 1,
                start: 3,
                end: 4,
                hide_in_gt: true,
            }],
            ..SyntheticConfig::default()
        };
        let (gt, dets) = generate_synthetic(&cfg).unwrap();
        for t in [3u32, 4] {
            assert!(gt.frames[t as usize].items.is_empty());
            assert!(!dets.detections.iter().any(|d| d.frame == t));
        }
        assert!(!gt.frames[2].items.is_empty());
        assert!(!gt.frames[5].items.is_empty());
    }

    #[test]
    fn same_seed_same_files_different_seed_different_embeddings() {
        let cfg = SyntheticConfig {
            num_instances: 3,
            frames: 6,
            embedding_dim: 16,
            embedding_noise: 0.05,
            detection_noise: 1.0,
            ..SyntheticConfig::default()
        };
        let dir = tempdir().unwrap();
        let serialize = |cfg: &SyntheticConfig, tag: &str| {
            let (gt, dets) = generate_synthetic(cfg).unwrap();
            let ap = dir.path().join(format!("a-{tag}.json"));
            let dp = dir.path().join(format!("d-{tag}.jsonl"));
            save_annotations(&ap, &gt).unwrap();
            save_detections(&dp, &dets).unwrap();
            (std::fs::read(ap).unwrap(), std::fs::read(dp).unwrap())
        };
        let first = serialize(&cfg, "1");
        let second = serialize(&cfg, "2");
        assert_eq!(first, second);

        let reseeded = SyntheticConfig { seed: 18, ..cfg };
        let third = serialize(&reseeded, "3");
        assert_ne!(first.1, third.1);
    }

    #[test]
    fn base_embeddings_respect_the_separation_floor() {
        let cfg = SyntheticConfig {
            num_instances: 6,
            frames: 1,
            embedding_dim: 32,
            embedding_min_separation: 1.2,
            ..SyntheticConfig::default()
        };
        let (_, dets) = generate_synthetic(&cfg).unwrap();
        let frame0: Vec<&Detection> = dets.detections.iter().filter(|d| d.frame == 0).collect();
        for (i, a) in frame0.iter().enumerate() {
            for b in frame0.iter().skip(i + 1) {
                assert!(l2(a.embedding.as_slice(), b.embedding.as_slice()) >= 1.2);
            }
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let base = SyntheticConfig::default();
        for bad in [
            SyntheticConfig {
                width: 16,
                ..base.clone()
            },
            SyntheticConfig {
                num_instances: 0,
                ..base.clone()
            },
            SyntheticConfig {
                frames: 0,
                ..base.clone()
            },
            SyntheticConfig {
                min_size: 50,
                max_size: 40,
                ..base.clone()
            },
            SyntheticConfig {
                max_size: 200,
                ..base.clone()
            },
            SyntheticConfig {
                speed_min: 3.0,
                speed_max: 1.0,
                ..base.clone()
            },
            SyntheticConfig {
                embedding_noise: -0.1,
                ..base.clone()
            },
            SyntheticConfig {
                embedding_dim: 0,
                ..base.clone()
            },
            SyntheticConfig {
                occlusions: vec![OcclusionEvent {
                    instance_id: 9,
                    start: 0,
                    end: 1,
                    hide_in_gt: false,
                }],
                ..base.clone()
            },
            SyntheticConfig {
                occlusions: vec![OcclusionEvent {
                    instance_id: 1,
                    start: 5,
                    end: 2,
                    hide_in_gt: false,
                }],
                ..base.clone()
            },
        ] {
            assert!(matches!(
                generate_synthetic(&bad),
                Err(Error::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn overlapping_instances_produce_carved_ground_truth() {
        // Two instances confined to a small scene must overlap eventually;
        // when they do, the lower id's mask loses the contested pixels.
        let cfg = SyntheticConfig {
            num_instances: 2,
            frames: 120,
            width: 48,
            height: 48,
            min_size: 20,
            max_size: 24,
            speed_min: 1.0,
            speed_max: 2.0,
            embedding_dim: 8,
            ..SyntheticConfig::default()
        };
        let (gt, _) = generate_synthetic(&cfg).unwrap();
        for fr in &gt.frames {
            if fr.items.len() == 2 {
                let inter = fr.items[0].1.intersection_area(&fr.items[1].1).unwrap();
                assert_eq!(inter, 0, "visible masks must be disjoint");
            }
        }
        // Instance 1 is a rectangle of constant size that never clips the
        // border, so any dip below its full area means instance 2 covered it.
        let areas: Vec<Option<u64>> = gt
            .frames
            .iter()
            .map(|fr| {
                fr.items
                    .iter()
                    .find(|(id, _)| *id == 1)
                    .map(|(_, m)| m.area())
            })
            .collect();
        let full = areas.iter().flatten().max().copied().unwrap();
        let saw_overlap = areas.iter().any(|a| a.is_none_or(|v| v < full));
        assert!(saw_overlap, "scene never produced an occlusion");
    }
}
