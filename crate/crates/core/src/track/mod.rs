//! Frame-to-frame identity association: per-track Kalman motion models, an
//! appearance+geometry cost matrix, Hungarian matching, and track lifecycle
//! (spawn, lose, remove, reappear).

pub mod hungarian;
pub mod kalman;

use crate::error::{Error, Result};
use crate::loss::{cosine_distance, Embedding};
use crate::mask::{BinaryMask, BoundingBox};
pub use hungarian::{hungarian, CostMatrix, FORBIDDEN};
pub use kalman::{KalmanConfig, KalmanFilter, KalmanState};

/// One detector output: where, how confident, what it looks like.
#[derive(Debug, Clone)]
pub struct Detection {
    pub bbox: BoundingBox,
    pub score: f64,
    pub embedding: Embedding,
    pub mask: Option<BinaryMask>,
    pub frame: u32,
}

impl Detection {
    pub fn new(
        bbox: BoundingBox,
        score: f64,
        embedding: Embedding,
        mask: Option<BinaryMask>,
        frame: u32,
    ) -> Result<Self> {
        if !score.is_finite() {
            return Err(Error::NonFinite("detection score"));
        }
        Ok(Detection {
            bbox,
            score,
            embedding,
            mask,
            frame,
        })
    }
}

/// Lifecycle of a track.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackStatus {
    /// Matched in the most recent frame.
    Active,
    /// Missed one or more recent frames; still eligible for matching.
    Lost,
    /// Missed longer than `max_age`; dropped from the tracker.
    Removed,
}

/// One tracked identity.
#[derive(Debug, Clone)]
pub struct Track {
    pub id: u32,
    pub state: KalmanState,
    pub last_embedding: Embedding,
    pub status: TrackStatus,
    /// Frames since the last match (0 right after a match).
    pub age: u32,
}

/// Relative weights of the appearance and geometry cost terms.
#[derive(Debug, Clone, Copy)]
pub struct CostWeights {
    pub w_emb: f64,
    pub w_iou: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        CostWeights {
            w_emb: 0.7,
            w_iou: 0.3,
        }
    }
}

/// Tracker behavior knobs; defaults follow the common one-second memory at
/// 30 FPS with appearance-dominant matching.
#[derive(Debug, Clone, Copy)]
pub struct TrackerConfig {
    pub weights: CostWeights,
    /// Costs above this become forbidden pairs.
    pub gate: f64,
    /// Frames a track may go unmatched before removal.
    pub max_age: u32,
    /// Blend factor for the running track embedding: kept mass of the old
    /// embedding on each match.
    pub ema_alpha: f64,
    /// Minimum detection score to spawn a new track.
    pub spawn_score: f64,
    pub kalman: KalmanConfig,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            weights: CostWeights::default(),
            gate: 0.9,
            max_age: 30,
            ema_alpha: 0.9,
            spawn_score: 0.5,
            kalman: KalmanConfig::default(),
        }
    }
}

impl TrackerConfig {
    fn validate(&self) -> Result<()> {
        let w = &self.weights;
        if !w.w_emb.is_finite() || !w.w_iou.is_finite() || w.w_emb < 0.0 || w.w_iou < 0.0 {
            return Err(Error::InvalidConfig(
                "cost weights must be finite and >= 0".into(),
            ));
        }
        if w.w_emb + w.w_iou <= 0.0 {
            return Err(Error::InvalidConfig(
                "at least one cost weight must be positive".into(),
            ));
        }
        if !self.gate.is_finite() || self.gate <= 0.0 {
            return Err(Error::InvalidConfig("gate must be finite and > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.ema_alpha) {
            return Err(Error::InvalidConfig(
                "embedding blend factor must be in [0, 1]".into(),
            ));
        }
        if !self.spawn_score.is_finite() {
            return Err(Error::InvalidConfig("spawn score must be finite".into()));
        }
        Ok(())
    }
}

/// Detections scoring at least `score_threshold`, keeping the `k` highest
/// scores, in their original order. Ties at the k-th score keep the earlier
/// detection.
pub fn select_top_k(detections: &[Detection], k: usize, score_threshold: f64) -> Vec<Detection> {
    let mut ranked: Vec<usize> = (0..detections.len())
        .filter(|&i| detections[i].score >= score_threshold)
        .collect();
    // Stable sort by descending score: equal scores stay in input order.
    ranked.sort_by(|&a, &b| {
        detections[b]
            .score
            .partial_cmp(&detections[a].score)
            .expect("scores validated finite")
    });
    ranked.truncate(k);
    ranked.sort_unstable();
    ranked.into_iter().map(|i| detections[i].clone()).collect()
}

/// Association cost between live tracks (rows, at their current predicted
/// states) and detections (columns):
/// `w_emb · clamped-cosine-distance + w_iou · (1 − box IoU)`,
/// with entries above `gate` replaced by [`FORBIDDEN`].
pub fn cost_matrix(
    tracks: &[Track],
    detections: &[Detection],
    weights: &CostWeights,
    gate: f64,
) -> Result<CostMatrix> {
    let mut costs = CostMatrix::zeros(tracks.len(), detections.len());
    for (i, track) in tracks.iter().enumerate() {
        let tb = track.state.bbox_ltrb();
        for (j, det) in detections.iter().enumerate() {
            let d_emb = cosine_distance(&track.last_embedding, &det.embedding)?;
            let iou = iou_ltrb(
                tb,
                [
                    f64::from(det.bbox.x_min),
                    f64::from(det.bbox.y_min),
                    f64::from(det.bbox.x_max),
                    f64::from(det.bbox.y_max),
                ],
            );
            let cost = weights.w_emb * d_emb + weights.w_iou * (1.0 - iou);
            costs.set(i, j, if cost > gate { FORBIDDEN } else { cost });
        }
    }
    Ok(costs)
}

fn iou_ltrb(a: [f64; 4], b: [f64; 4]) -> f64 {
    let ix = (a[2].min(b[2]) - a[0].max(b[0])).max(0.0);
    let iy = (a[3].min(b[3]) - a[1].max(b[1])).max(0.0);
    let inter = ix * iy;
    let area_a = ((a[2] - a[0]) * (a[3] - a[1])).max(0.0);
    let area_b = ((b[2] - b[0]) * (b[3] - b[1])).max(0.0);
    let union = area_a + area_b - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// The association engine for one video sequence.
#[derive(Debug, Clone)]
pub struct Tracker {
    config: TrackerConfig,
    filter: KalmanFilter,
    tracks: Vec<Track>,
    next_id: u32,
    initialized: bool,
}

impl Tracker {
    pub fn new(config: TrackerConfig) -> Result<Self> {
        config.validate()?;
        let filter = KalmanFilter::new(config.kalman)?;
        Ok(Tracker {
            config,
            filter,
            tracks: Vec::new(),
            next_id: 1,
            initialized: false,
        })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    /// Live tracks (Active and Lost).
    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn is_initialized(&self) -> bool {
        self.initialized
    }

    /// First-frame initialization: one Active track per detection, ids `1..n`
    /// in detection order. Resets any prior state. Returns
    /// `(detection index, id)` pairs.
    pub fn init(&mut self, detections: &[Detection]) -> Vec<(usize, u32)> {
        self.tracks.clear();
        self.next_id = 1;
        self.initialized = true;
        let mut out = Vec::with_capacity(detections.len());
        for (i, det) in detections.iter().enumerate() {
            let id = self.next_id;
            self.next_id += 1;
            self.tracks.push(Track {
                id,
                state: self.filter.initiate(&det.bbox),
                last_embedding: det.embedding.clone(),
                status: TrackStatus::Active,
                age: 0,
            });
            out.push((i, id));
        }
        out
    }

    /// Associates one frame of detections with the live tracks.
    ///
    /// All live tracks are motion-predicted; Hungarian matching runs on the
    /// gated cost matrix; matched tracks get a Kalman correction, an
    /// embedding blend, and age 0; unmatched tracks become (or stay) Lost
    /// and are removed past `max_age`; unmatched detections above the spawn
    /// score open new tracks with fresh ids. Returns `(detection index, id)`
    /// for every detection that ended the frame owned by a track, in
    /// detection order.
    pub fn match_frame(&mut self, detections: &[Detection]) -> Result<Vec<(usize, u32)>> {
        if !self.initialized {
            return Err(Error::NotInitialized);
        }
        for track in &mut self.tracks {
            track.state = self.filter.predict(&track.state)?;
        }
        let costs = cost_matrix(
            &self.tracks,
            detections,
            &self.config.weights,
            self.config.gate,
        )?;
        let assignment = hungarian(&costs);

        let mut out: Vec<(usize, u32)> = Vec::new();
        let mut det_taken = vec![false; detections.len()];
        for (i, det_idx) in assignment.iter().enumerate() {
            let track = &mut self.tracks[i];
            match det_idx {
                Some(j) => {
                    let det = &detections[*j];
                    track.state = self.filter.update(&track.state, &det.bbox)?;
                    track.last_embedding = track
                        .last_embedding
                        .blend(&det.embedding, self.config.ema_alpha)?;
                    track.status = TrackStatus::Active;
                    track.age = 0;
                    det_taken[*j] = true;
                    out.push((*j, track.id));
                }
                None => {
                    track.age += 1;
                    track.status = if track.age > self.config.max_age {
                        TrackStatus::Removed
                    } else {
                        TrackStatus::Lost
                    };
                }
            }
        }
        self.tracks.retain(|t| t.status != TrackStatus::Removed);

        for (j, det) in detections.iter().enumerate() {
            if det_taken[j] || det.score < self.config.spawn_score {
                continue;
            }
            let id = self.next_id;
            self.next_id += 1;
            self.tracks.push(Track {
                id,
                state: self.filter.initiate(&det.bbox),
                last_embedding: det.embedding.clone(),
                status: TrackStatus::Active,
                age: 0,
            });
            out.push((j, id));
        }

        out.sort_unstable_by_key(|(j, _)| *j);
        Ok(out)
    }
}
