//! Positive-sample assignment: map image-space instance annotations onto
//! multi-level feature grids, label cells positive per strategy, and detect
//! and resolve cells claimed by more than one instance.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::mask::{inner_center, mask_bbox, mask_centroid, BinaryMask, BoundingBox, Point};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One level of a feature pyramid: a grid of cells, each covering
/// `stride`×`stride` image pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureGrid {
    /// Pyramid level number (3, 4, 5 for the default three-level setup).
    pub level: u8,
    /// Image pixels per cell.
    pub stride: u32,
    /// Cells per row.
    pub width: u32,
    /// Cells per column.
    pub height: u32,
    pub image_width: u32,
    pub image_height: u32,
}

impl FeatureGrid {
    pub fn num_cells(&self) -> usize {
        self.width as usize * self.height as usize
    }
}

/// Ground-truth instance: identity, full-frame mask, tight box, frame index.
#[derive(Debug, Clone)]
pub struct InstanceAnnotation {
    pub instance_id: u32,
    pub mask: BinaryMask,
    pub bbox: BoundingBox,
    pub frame: u32,
}

impl InstanceAnnotation {
    /// Builds an annotation, deriving the tight bounding box from the mask.
    /// Ids must be ≥ 1; 0 is reserved for the background label.
    pub fn new(instance_id: u32, mask: BinaryMask, frame: u32) -> Result<Self> {
        if instance_id == 0 {
            return Err(Error::InconsistentIds(
                "instance id 0 is reserved for background".into(),
            ));
        }
        let bbox = mask_bbox(&mask)?;
        Ok(InstanceAnnotation {
            instance_id,
            mask,
            bbox,
            frame,
        })
    }
}

/// How a grid cell earns a positive label for an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Positive wherever the cell center falls inside the instance's box.
    InsideBox,
    /// Positive within half a stride (Chebyshev) of the box center.
    CenterBox,
    /// Positive within half a stride of the mask centroid.
    CentroidMask,
    /// Positive within half a stride of the mask's inner center.
    InnerCenter,
}

/// What to do with cells claimed by two or more instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ResolvePolicy {
    /// Drop the cell from the positive set (label −1, excluded from training).
    ToNegative,
    /// Keep the claimant with the smallest mask area; ties go to the smaller id.
    SmallestArea,
}

/// Label value for a cell that was claimed by multiple instances and
/// eliminated, as opposed to plain background (0).
pub const AMBIGUOUS_LABEL: i64 = -1;

/// Per-level mapping from grid cells to instance labels.
///
/// Labels: `0` = negative/background, `≥ 1` = owning instance id,
/// [`AMBIGUOUS_LABEL`] = claimed by several instances and eliminated (or not
/// yet resolved; see [`SampleAssignment::is_resolved`]).
#[derive(Debug, Clone)]
pub struct SampleAssignment {
    grid: FeatureGrid,
    strategy: Strategy,
    labels: Vec<i64>,
    /// Raw claims per cell, ascending ids; kept so ambiguity can be
    /// re-examined or re-resolved under a different policy.
    claims: Vec<Vec<u32>>,
    /// Mask area per claiming instance, for the smallest-area policy.
    areas: BTreeMap<u32, u64>,
    resolved: bool,
}

/// One multiply-claimed cell and the instances contesting it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AmbiguousCell {
    pub cx: u32,
    pub cy: u32,
    /// Claiming instance ids, ascending.
    pub ids: Vec<u32>,
}

impl SampleAssignment {
    pub fn grid(&self) -> &FeatureGrid {
        &self.grid
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// Whether ambiguous cells have been resolved by a policy.
    pub fn is_resolved(&self) -> bool {
        self.resolved
    }

    /// Row-major cell labels.
    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn label_at(&self, cx: u32, cy: u32) -> Result<i64> {
        if cx >= self.grid.width || cy >= self.grid.height {
            return Err(Error::OutOfRange(format!(
                "cell ({cx},{cy}) outside {}x{} grid",
                self.grid.width, self.grid.height
            )));
        }
        Ok(self.labels[cy as usize * self.grid.width as usize + cx as usize])
    }

    /// Claiming ids of a cell (ascending), before any resolution.
    pub fn claims_at(&self, cx: u32, cy: u32) -> Result<&[u32]> {
        if cx >= self.grid.width || cy >= self.grid.height {
            return Err(Error::OutOfRange(format!(
                "cell ({cx},{cy}) outside {}x{} grid",
                self.grid.width, self.grid.height
            )));
        }
        Ok(&self.claims[cy as usize * self.grid.width as usize + cx as usize])
    }

    /// Positively labeled cells as `(cx, cy, instance id)`, row-major.
    pub fn positive_cells(&self) -> Vec<(u32, u32, u32)> {
        let mut out = Vec::new();
        for cy in 0..self.grid.height {
            for cx in 0..self.grid.width {
                let label = self.labels[cy as usize * self.grid.width as usize + cx as usize];
                if label >= 1 {
                    out.push((cx, cy, label as u32));
                }
            }
        }
        out
    }
}

/// Builds the three-level feature pyramid with strides `base`, `2·base`,
/// `4·base`; grid extents round up so the cells cover the whole image.
pub fn build_grids(
    image_width: u32,
    image_height: u32,
    base_stride: u32,
) -> Result<Vec<FeatureGrid>> {
    if base_stride == 0 {
        return Err(Error::InvalidDims("base stride must be >= 1".into()));
    }
    if image_width < base_stride || image_height < base_stride {
        return Err(Error::InvalidDims(format!(
            "image {image_width}x{image_height} smaller than base stride {base_stride}"
        )));
    }
    Ok((0..3u8)
        .map(|i| {
            let stride = base_stride << i;
            FeatureGrid {
                level: 3 + i,
                stride,
                width: image_width.div_ceil(stride),
                height: image_height.div_ceil(stride),
                image_width,
                image_height,
            }
        })
        .collect())
}

/// Image-space point at the center of a grid cell:
/// `(cx·stride + stride/2, cy·stride + stride/2)`, halves floored.
pub fn cell_center(grid: &FeatureGrid, cx: u32, cy: u32) -> Result<Point> {
    if cx >= grid.width || cy >= grid.height {
        return Err(Error::OutOfRange(format!(
            "cell ({cx},{cy}) outside {}x{} grid",
            grid.width, grid.height
        )));
    }
    Ok(Point::new(
        cx * grid.stride + grid.stride / 2,
        cy * grid.stride + grid.stride / 2,
    ))
}

/// Size ranges routing instances to pyramid levels: `bounds[i]` is the
/// inclusive upper bound on `max(box width, box height)` for level `i`;
/// anything larger than the last bound goes to the last level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelRanges {
    bounds: Vec<u32>,
}

impl Default for LevelRanges {
    fn default() -> Self {
        LevelRanges {
            bounds: vec![64, 128],
        }
    }
}

impl LevelRanges {
    /// Bounds must be strictly increasing; `bounds.len() + 1` levels result.
    pub fn new(bounds: Vec<u32>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidConfig("level ranges need >= 1 bound".into()));
        }
        if bounds.windows(2).any(|w| w[0] >= w[1]) || bounds[0] == 0 {
            return Err(Error::InvalidConfig(format!(
                "level range bounds {bounds:?} must be positive and strictly increasing"
            )));
        }
        Ok(LevelRanges { bounds })
    }

    pub fn num_levels(&self) -> usize {
        self.bounds.len() + 1
    }

    pub fn bounds(&self) -> &[u32] {
        &self.bounds
    }

    fn level_for(&self, max_side: u32) -> usize {
        self.bounds
            .iter()
            .position(|&b| max_side <= b)
            .unwrap_or(self.bounds.len())
    }
}

/// Index of the pyramid level responsible for an instance, by the larger
/// side of its bounding box.
pub fn level_for_instance(instance: &InstanceAnnotation, ranges: &LevelRanges) -> usize {
    ranges.level_for(instance.bbox.width().max(instance.bbox.height()))
}

/// Labels every grid cell for every instance under one strategy.
///
/// `InsideBox` marks a cell positive when its image center lies inside an
/// instance's box; the center-point strategies mark cells whose image center
/// is within half a stride (Chebyshev) of the strategy's center point. Each
/// instance claims cells only at its own pyramid level. Cells claimed by two
/// or more instances keep the multi-claim record and are labeled
/// [`AMBIGUOUS_LABEL`] until resolved.
pub fn assign(
    instances: &[InstanceAnnotation],
    grids: &[FeatureGrid],
    ranges: &LevelRanges,
    strategy: Strategy,
    k: usize,
    seed: u64,
) -> Result<Vec<SampleAssignment>> {
    if grids.is_empty() {
        return Err(Error::InvalidDims("no feature grids".into()));
    }
    if ranges.num_levels() != grids.len() {
        return Err(Error::InvalidConfig(format!(
            "{} level ranges for {} grids",
            ranges.num_levels(),
            grids.len()
        )));
    }
    let (iw, ih) = (grids[0].image_width, grids[0].image_height);
    for inst in instances {
        if inst.mask.width() != iw || inst.mask.height() != ih {
            return Err(Error::MaskOutOfBounds(format!(
                "instance {} mask is {}x{}, image is {iw}x{ih}",
                inst.instance_id,
                inst.mask.width(),
                inst.mask.height()
            )));
        }
    }

    let mut claims: Vec<Vec<Vec<u32>>> = grids
        .iter()
        .map(|g| vec![Vec::new(); g.num_cells()])
        .collect();
    let mut areas: BTreeMap<u32, u64> = BTreeMap::new();

    for inst in instances {
        areas.insert(inst.instance_id, inst.mask.area());
        let level = level_for_instance(inst, ranges);
        let grid = &grids[level];
        let center: Option<(f64, f64)> = match strategy {
            Strategy::InsideBox => None,
            Strategy::CenterBox => Some(inst.bbox.center()),
            Strategy::CentroidMask => {
                let c = mask_centroid(&inst.mask)?;
                Some((f64::from(c.x), f64::from(c.y)))
            }
            Strategy::InnerCenter => {
                let c = inner_center(&inst.mask, k, seed)?;
                Some((f64::from(c.x), f64::from(c.y)))
            }
        };
        let radius = f64::from(grid.stride) / 2.0;
        for cy in 0..grid.height {
            for cx in 0..grid.width {
                let p = cell_center(grid, cx, cy).expect("cell in range");
                let hit = match center {
                    None => inst.bbox.contains(f64::from(p.x), f64::from(p.y)),
                    Some((sx, sy)) => {
                        (f64::from(p.x) - sx).abs() <= radius
                            && (f64::from(p.y) - sy).abs() <= radius
                    }
                };
                if hit {
                    claims[level][cy as usize * grid.width as usize + cx as usize]
                        .push(inst.instance_id);
                }
            }
        }
    }

    Ok(grids
        .iter()
        .enumerate()
        .map(|(level, grid)| {
            let cell_claims = &mut claims[level];
            let labels = cell_claims
                .iter_mut()
                .map(|ids| {
                    ids.sort_unstable();
                    match ids.len() {
                        0 => 0,
                        1 => i64::from(ids[0]),
                        _ => AMBIGUOUS_LABEL,
                    }
                })
                .collect();
            SampleAssignment {
                grid: *grid,
                strategy,
                labels,
                claims: std::mem::take(cell_claims),
                areas: areas.clone(),
                resolved: false,
            }
        })
        .collect())
}

/// All cells carrying two or more claims, row-major; ids ascending per cell.
pub fn detect_ambiguous(assignment: &SampleAssignment) -> Vec<AmbiguousCell> {
    let mut out = Vec::new();
    for cy in 0..assignment.grid.height {
        for cx in 0..assignment.grid.width {
            let ids =
                &assignment.claims[cy as usize * assignment.grid.width as usize + cx as usize];
            if ids.len() >= 2 {
                out.push(AmbiguousCell {
                    cx,
                    cy,
                    ids: ids.clone(),
                });
            }
        }
    }
    out
}

/// Applies a policy to every multiply-claimed cell and marks the assignment
/// resolved. Single-claim and negative cells are untouched.
pub fn resolve_ambiguous(assignment: &SampleAssignment, policy: ResolvePolicy) -> SampleAssignment {
    let mut resolved = assignment.clone();
    for (i, ids) in assignment.claims.iter().enumerate() {
        if ids.len() < 2 {
            continue;
        }
        resolved.labels[i] = match policy {
            ResolvePolicy::ToNegative => AMBIGUOUS_LABEL,
            ResolvePolicy::SmallestArea => {
                let winner = ids
                    .iter()
                    .min_by_key(|&&id| (assignment.areas.get(&id).copied().unwrap_or(u64::MAX), id))
                    .expect("cell has claimants");
                i64::from(*winner)
            }
        };
    }
    resolved.resolved = true;
    resolved
}

/// Fraction of positive cells whose image center lands on a set pixel of the
/// owning instance's mask, plus the complement cells.
#[derive(Debug, Clone, Serialize)]
pub struct InsideMaskReport {
    /// inside / (inside + outside).
    pub fraction: f64,
    pub inside_count: usize,
    pub outside_count: usize,
    /// Positive cells whose center misses the owner's mask: `(cx, cy, id)`.
    pub outside_cells: Vec<(u32, u32, u32)>,
}

/// Measures how many positive cells actually sit on their instance's mask.
/// Cell centers that fall outside the image (possible in the rounding slack
/// of edge cells) count as outside the mask.
pub fn inside_mask_fraction(
    assignment: &SampleAssignment,
    instances: &[InstanceAnnotation],
) -> Result<InsideMaskReport> {
    let positives = assignment.positive_cells();
    if positives.is_empty() {
        return Err(Error::NoPositives);
    }
    let mut by_id: BTreeMap<u32, &BinaryMask> = BTreeMap::new();
    for inst in instances {
        by_id.insert(inst.instance_id, &inst.mask);
    }
    let mut inside = 0usize;
    let mut outside_cells = Vec::new();
    for (cx, cy, id) in positives {
        let mask = by_id.get(&id).ok_or_else(|| {
            Error::InconsistentIds(format!("label {id} has no matching instance"))
        })?;
        let p = cell_center(&assignment.grid, cx, cy).expect("positive cell in range");
        let on_mask = p.x < mask.width() && p.y < mask.height() && mask.get(p.x, p.y);
        if on_mask {
            inside += 1;
        } else {
            outside_cells.push((cx, cy, id));
        }
    }
    let total = inside + outside_cells.len();
    Ok(InsideMaskReport {
        fraction: inside as f64 / total as f64,
        inside_count: inside,
        outside_count: outside_cells.len(),
        outside_cells,
    })
}

/// Augments `base` with a seeded random `percent`% of `other`'s positive
/// cells. A transferred cell keeps its id when `base` is negative there;
/// cells where the two sets carry different ids are eliminated (labeled
/// [`AMBIGUOUS_LABEL`]), and cells `base` already eliminated stay eliminated.
///
/// `percent` must be one of {0, 10, …, 100}; the transferred count is
/// `round(percent/100 · |other positives|)`.
pub fn mix_positive_sets(
    base: &SampleAssignment,
    other: &SampleAssignment,
    percent: u32,
    seed: u64,
) -> Result<SampleAssignment> {
    if base.grid != other.grid {
        return Err(Error::GridMismatch);
    }
    if percent > 100 || !percent.is_multiple_of(10) {
        return Err(Error::InvalidConfig(format!(
            "mix percentage {percent} not in {{0, 10, …, 100}}"
        )));
    }
    let donors = other.positive_cells();
    let n_add = ((f64::from(percent) / 100.0) * donors.len() as f64).round() as usize;
    let mut picked: Vec<usize> = if n_add >= donors.len() {
        (0..donors.len()).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = rand::seq::index::sample(&mut rng, donors.len(), n_add).into_vec();
        idx.sort_unstable();
        idx
    };

    let mut mixed = base.clone();
    for i in picked.drain(..) {
        let (cx, cy, id) = donors[i];
        let cell = cy as usize * base.grid.width as usize + cx as usize;
        mixed.labels[cell] = match mixed.labels[cell] {
            0 => i64::from(id),
            l if l == i64::from(id) => l,
            AMBIGUOUS_LABEL => AMBIGUOUS_LABEL,
            _ => AMBIGUOUS_LABEL, // conflicting ids → eliminate
        };
    }
    Ok(mixed)
}
