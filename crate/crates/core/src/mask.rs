//! Binary-mask primitives: bounding boxes, centroids, edge extraction, IoU,
//! and the inner center (the set pixel minimizing the summed squared distance
//! to a sampled set of mask edge points).

use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Integer pixel coordinate. Origin is the top-left pixel; `x` grows
/// rightward (columns), `y` grows downward (rows).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub fn new(x: u32, y: u32) -> Self {
        Point { x, y }
    }
}

/// Axis-aligned pixel box; `x_min`/`y_min` inclusive, `x_max`/`y_max` exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x_min: u32,
    pub y_min: u32,
    pub x_max: u32,
    pub y_max: u32,
}

impl BoundingBox {
    /// Builds a box, rejecting empty extents.
    pub fn new(x_min: u32, y_min: u32, x_max: u32, y_max: u32) -> Result<Self> {
        if x_min >= x_max || y_min >= y_max {
            return Err(Error::InvalidDims(format!(
                "box [{x_min},{y_min},{x_max},{y_max}] has empty extent"
            )));
        }
        Ok(BoundingBox {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    pub fn width(&self) -> u32 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> u32 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> u64 {
        u64::from(self.width()) * u64::from(self.height())
    }

    /// Geometric center as a real point (may land on half-pixel coordinates).
    pub fn center(&self) -> (f64, f64) {
        (
            (f64::from(self.x_min) + f64::from(self.x_max)) / 2.0,
            (f64::from(self.y_min) + f64::from(self.y_max)) / 2.0,
        )
    }

    /// Whether a real point lies inside the box (min inclusive, max exclusive).
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= f64::from(self.x_min)
            && x < f64::from(self.x_max)
            && y >= f64::from(self.y_min)
            && y < f64::from(self.y_max)
    }

    /// Intersection-over-union of two boxes.
    pub fn iou(&self, other: &BoundingBox) -> f64 {
        let ix_min = self.x_min.max(other.x_min);
        let iy_min = self.y_min.max(other.y_min);
        let ix_max = self.x_max.min(other.x_max);
        let iy_max = self.y_max.min(other.y_max);
        if ix_min >= ix_max || iy_min >= iy_max {
            return 0.0;
        }
        let inter = u64::from(ix_max - ix_min) * u64::from(iy_max - iy_min);
        let union = self.area() + other.area() - inter;
        inter as f64 / union as f64
    }
}

/// Dense binary occupancy grid stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryMask {
    /// All-unset mask of the given dimensions.
    pub fn new(width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDims(format!(
                "mask dimensions {width}x{height} must be positive"
            )));
        }
        Ok(BinaryMask {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        })
    }

    /// Mask from an explicit row-major bit vector.
    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDims(format!(
                "mask dimensions {width}x{height} must be positive"
            )));
        }
        if bits.len() != width as usize * height as usize {
            return Err(Error::InvalidDims(format!(
                "bit count {} does not equal {width}x{height}",
                bits.len()
            )));
        }
        Ok(BinaryMask {
            width,
            height,
            bits,
        })
    }

    /// Mask with the listed pixels set.
    pub fn from_points(width: u32, height: u32, points: &[(u32, u32)]) -> Result<Self> {
        let mut mask = BinaryMask::new(width, height)?;
        for &(x, y) in points {
            if x >= width || y >= height {
                return Err(Error::OutOfRange(format!(
                    "point ({x},{y}) outside {width}x{height} mask"
                )));
            }
            mask.set(x, y, true);
        }
        Ok(mask)
    }

    /// Fully set mask.
    pub fn filled(width: u32, height: u32) -> Result<Self> {
        let mut m = BinaryMask::new(width, height)?;
        m.bits.fill(true);
        Ok(m)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    fn index(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y as usize * self.width as usize + x as usize
    }

    /// Pixel value; panics when the coordinate is outside the grid.
    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        assert!(
            x < self.width && y < self.height,
            "pixel ({x},{y}) outside {}x{} mask",
            self.width,
            self.height
        );
        self.bits[self.index(x, y)]
    }

    /// Sets a pixel; panics when the coordinate is outside the grid.
    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        assert!(
            x < self.width && y < self.height,
            "pixel ({x},{y}) outside {}x{} mask",
            self.width,
            self.height
        );
        let i = self.index(x, y);
        self.bits[i] = value;
    }

    /// Number of set pixels.
    pub fn area(&self) -> u64 {
        self.bits.iter().filter(|&&b| b).count() as u64
    }

    /// True when no pixel is set.
    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Set pixels in row-major order.
    pub fn set_points(&self) -> Vec<Point> {
        let mut pts = Vec::new();
        for y in 0..self.height {
            let row = y as usize * self.width as usize;
            for x in 0..self.width {
                if self.bits[row + x as usize] {
                    pts.push(Point::new(x, y));
                }
            }
        }
        pts
    }

    /// Raw row-major bits.
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Pixels set in `self` but not in `other`.
    pub fn difference(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.check_same_dims(other)?;
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(&a, &b)| a && !b)
            .collect();
        BinaryMask::from_bits(self.width, self.height, bits)
    }

    /// Number of pixels set in both masks.
    pub fn intersection_area(&self, other: &BinaryMask) -> Result<u64> {
        self.check_same_dims(other)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .filter(|(&a, &b)| a && b)
            .count() as u64)
    }

    pub(crate) fn check_same_dims(&self, other: &BinaryMask) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        Ok(())
    }
}

/// Tight axis-aligned box around all set pixels.
pub fn mask_bbox(mask: &BinaryMask) -> Result<BoundingBox> {
    let mut x_min = u32::MAX;
    let mut y_min = u32::MAX;
    let mut x_max = 0u32;
    let mut y_max = 0u32;
    let mut any = false;
    for y in 0..mask.height() {
        let row = y as usize * mask.width() as usize;
        for x in 0..mask.width() {
            if mask.bits[row + x as usize] {
                any = true;
                x_min = x_min.min(x);
                y_min = y_min.min(y);
                x_max = x_max.max(x);
                y_max = y_max.max(y);
            }
        }
    }
    if !any {
        return Err(Error::EmptyMask);
    }
    BoundingBox::new(x_min, y_min, x_max + 1, y_max + 1)
}

/// Integer pixel nearest (Euclidean) to the mean of all set-pixel coordinates.
///
/// Ties break toward the smaller coordinate on each axis (hence smaller `y`,
/// then smaller `x`). The returned pixel is not necessarily set: concave
/// masks can place the mean over a hole.
pub fn mask_centroid(mask: &BinaryMask) -> Result<Point> {
    let mut n: u64 = 0;
    let mut sx: u64 = 0;
    let mut sy: u64 = 0;
    for y in 0..mask.height() {
        let row = y as usize * mask.width() as usize;
        for x in 0..mask.width() {
            if mask.bits[row + x as usize] {
                n += 1;
                sx += u64::from(x);
                sy += u64::from(y);
            }
        }
    }
    if n == 0 {
        return Err(Error::EmptyMask);
    }
    Ok(Point::new(nearest_coord(sx, n), nearest_coord(sy, n)))
}

/// Integer v minimizing |n·v − s| over v ∈ {⌊s/n⌋, ⌊s/n⌋+1}; ties toward the
/// smaller v. Exact integer arithmetic: no float rounding involved.
fn nearest_coord(s: u64, n: u64) -> u32 {
    let floor = s / n;
    let d0 = s - n * floor; // distance of s below n·(floor+1), scaled by n
    if 2 * d0 > n {
        (floor + 1) as u32
    } else {
        floor as u32
    }
}

/// All set pixels with at least one unset or out-of-bounds 4-neighbor,
/// in row-major order.
pub fn mask_edge_points(mask: &BinaryMask) -> Result<Vec<Point>> {
    let (w, h) = (mask.width(), mask.height());
    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            let interior = x > 0
                && mask.get(x - 1, y)
                && x + 1 < w
                && mask.get(x + 1, y)
                && y > 0
                && mask.get(x, y - 1)
                && y + 1 < h
                && mask.get(x, y + 1);
            if !interior {
                edges.push(Point::new(x, y));
            }
        }
    }
    if edges.is_empty() {
        return Err(Error::EmptyMask);
    }
    Ok(edges)
}

/// Uniform sample of `k` edge points without replacement, deterministic for a
/// given seed. Returns all edges (in their original order) when `k >= |edges|`;
/// sampled subsets also preserve the original relative order.
pub fn sample_edge_points(edges: &[Point], k: usize, seed: u64) -> Result<Vec<Point>> {
    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }
    if k == 0 {
        return Err(Error::InvalidConfig(
            "edge sample count must be at least 1".into(),
        ));
    }
    if k >= edges.len() {
        return Ok(edges.to_vec());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, edges.len(), k).into_vec();
    idx.sort_unstable();
    Ok(idx.into_iter().map(|i| edges[i]).collect())
}

/// The set pixel minimizing the sum of squared distances to the sampled edge
/// set; ties break by smaller `y`, then smaller `x`. Unlike [`mask_centroid`],
/// the result is a set pixel by construction.
pub fn inner_center(mask: &BinaryMask, k: usize, seed: u64) -> Result<Point> {
    let edges = mask_edge_points(mask)?;
    let sampled = sample_edge_points(&edges, k, seed)?;
    Ok(inner_center_from_edges(mask, &sampled))
}

/// Argmin of Σ‖p − e‖² over set pixels p for a fixed edge sample.
///
/// Uses the expansion Σ‖p−e‖² = n·(x²+y²) − 2(x·Σxᵢ + y·Σyᵢ) + C with the
/// p-independent constant C dropped; integer arithmetic keeps the comparison
/// exact, so the result is bit-identical to summing the distances literally.
fn inner_center_from_edges(mask: &BinaryMask, edges: &[Point]) -> Point {
    let n = edges.len() as i128;
    let sx: i128 = edges.iter().map(|p| i128::from(p.x)).sum();
    let sy: i128 = edges.iter().map(|p| i128::from(p.y)).sum();
    let mut best: Option<(i128, Point)> = None;
    for y in 0..mask.height() {
        let row = y as usize * mask.width() as usize;
        for x in 0..mask.width() {
            if !mask.bits[row + x as usize] {
                continue;
            }
            let (xi, yi) = (i128::from(x), i128::from(y));
            let score = n * (xi * xi + yi * yi) - 2 * (xi * sx + yi * sy);
            // Row-major scan order means the first minimum seen already has
            // the smallest (y, x); only a strictly smaller score replaces it.
            if best.is_none_or(|(s, _)| score < s) {
                best = Some((score, Point::new(x, y)));
            }
        }
    }
    best.expect("mask verified nonempty by edge extraction").1
}

/// Intersection-over-union of two same-sized masks.
pub fn mask_iou(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    a.check_same_dims(b)?;
    let mut inter: u64 = 0;
    let mut union: u64 = 0;
    for (&pa, &pb) in a.bits.iter().zip(&b.bits) {
        if pa && pb {
            inter += 1;
        }
        if pa || pb {
            union += 1;
        }
    }
    if union == 0 {
        return Err(Error::BothEmpty);
    }
    Ok(inter as f64 / union as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Parses a pictorial mask: '#' = set, '.' = unset, one row per line.
    pub(crate) fn mask_from_art(art: &str) -> BinaryMask {
        let rows: Vec<&str> = art.trim().lines().map(str::trim).collect();
        let h = rows.len() as u32;
        let w = rows[0].len() as u32;
        let mut bits = Vec::with_capacity((w * h) as usize);
        for row in &rows {
            assert_eq!(row.len() as u32, w, "ragged mask art");
            for c in row.chars() {
                bits.push(c == '#');
            }
        }
        BinaryMask::from_bits(w, h, bits).unwrap()
    }

    /// Two vertical bars joined along the bottom row; the mean of the set
    /// pixels falls in the unset gap between the bars.
    fn u_shape() -> BinaryMask {
        mask_from_art(
            "#...#
             #...#
             #...#
             #...#
             #####",
        )
    }

    fn l_shape() -> BinaryMask {
        mask_from_art(
            "#....
             #....
             #....
             #....
             #####",
        )
    }

    /// One-pixel-wide square ring; every set pixel is an edge pixel.
    fn ring() -> BinaryMask {
        let mut m = BinaryMask::new(7, 7).unwrap();
        for i in 1..=5u32 {
            m.set(i, 1, true);
            m.set(i, 5, true);
            m.set(1, i, true);
            m.set(5, i, true);
        }
        m
    }

    fn h_shape() -> BinaryMask {
        mask_from_art(
            ".#...#.
             .#...#.
             .#...#.
             .#####.
             .#...#.
             .#...#.
             .#...#.",
        )
    }

    #[test]
    fn bbox_single_pixel() {
        let m = BinaryMask::from_points(5, 5, &[(2, 2)]).unwrap();
        assert_eq!(
            mask_bbox(&m).unwrap(),
            BoundingBox::new(2, 2, 3, 3).unwrap()
        );
    }

    #[test]
    fn bbox_full_mask() {
        let m = BinaryMask::filled(4, 6).unwrap();
        assert_eq!(
            mask_bbox(&m).unwrap(),
            BoundingBox::new(0, 0, 4, 6).unwrap()
        );
    }

    #[test]
    fn bbox_l_shape() {
        assert_eq!(
            mask_bbox(&l_shape()).unwrap(),
            BoundingBox::new(0, 0, 5, 5).unwrap()
        );
    }

    #[test]
    fn bbox_empty_mask_errors() {
        let m = BinaryMask::new(3, 3).unwrap();
        assert!(matches!(mask_bbox(&m), Err(Error::EmptyMask)));
    }

    #[test]
    fn centroid_full_and_single() {
        assert_eq!(
            mask_centroid(&BinaryMask::filled(5, 5).unwrap()).unwrap(),
            Point::new(2, 2)
        );
        let single = BinaryMask::from_points(5, 5, &[(1, 3)]).unwrap();
        assert_eq!(mask_centroid(&single).unwrap(), Point::new(1, 3));
    }

    #[test]
    fn centroid_of_u_shape_is_unset() {
        // 13 set pixels, Σx = 26, Σy = 32 → mean (2.0, 2.46) → pixel (2,2),
        // which sits in the gap between the bars.
        let m = u_shape();
        let c = mask_centroid(&m).unwrap();
        assert_eq!(c, Point::new(2, 2));
        assert!(!m.get(c.x, c.y));
    }

    #[test]
    fn centroid_rounding_prefers_smaller_on_ties() {
        // Two pixels at x=0 and x=1: mean x = 0.5, tie → 0.
        let m = BinaryMask::from_points(4, 1, &[(0, 0), (1, 0)]).unwrap();
        assert_eq!(mask_centroid(&m).unwrap(), Point::new(0, 0));
    }

    #[test]
    fn edge_points_single_pixel() {
        let m = BinaryMask::from_points(3, 3, &[(1, 1)]).unwrap();
        assert_eq!(mask_edge_points(&m).unwrap(), vec![Point::new(1, 1)]);
    }

    #[test]
    fn edge_points_full_3x3_excludes_center() {
        let m = BinaryMask::filled(3, 3).unwrap();
        let edges = mask_edge_points(&m).unwrap();
        assert_eq!(edges.len(), 8);
        assert!(!edges.contains(&Point::new(1, 1)));
    }

    #[test]
    fn edge_points_line_is_all_pixels() {
        let m = BinaryMask::from_points(5, 3, &[(0, 1), (1, 1), (2, 1), (3, 1), (4, 1)]).unwrap();
        assert_eq!(mask_edge_points(&m).unwrap().len(), 5);
    }

    #[test]
    fn edge_points_row_major_order() {
        let edges = mask_edge_points(&u_shape()).unwrap();
        let mut sorted = edges.clone();
        sorted.sort_by_key(|p| (p.y, p.x));
        assert_eq!(edges, sorted);
        // Thin shape: every set pixel is an edge pixel.
        assert_eq!(edges.len(), 13);
    }

    #[test]
    fn sampling_saturates_and_is_deterministic() {
        let edges = mask_edge_points(&ring()).unwrap();
        assert_eq!(edges.len(), 16);
        assert_eq!(sample_edge_points(&edges, 16, 7).unwrap(), edges);
        assert_eq!(sample_edge_points(&edges, 100, 7).unwrap(), edges);

        let a = sample_edge_points(&edges, 5, 42).unwrap();
        let b = sample_edge_points(&edges, 5, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        for p in &a {
            assert!(edges.contains(p));
        }
    }

    #[test]
    fn sampling_differs_across_seeds() {
        let edges: Vec<Point> = (0..100).map(|i| Point::new(i, 0)).collect();
        let a = sample_edge_points(&edges, 50, 1).unwrap();
        let b = sample_edge_points(&edges, 50, 2).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn sampling_rejects_empty_and_zero_k() {
        assert!(matches!(
            sample_edge_points(&[], 3, 0),
            Err(Error::EmptyInput)
        ));
        let edges = [Point::new(0, 0)];
        assert!(matches!(
            sample_edge_points(&edges, 0, 0),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn inner_center_full_square_is_center() {
        let m = BinaryMask::filled(5, 5).unwrap();
        assert_eq!(inner_center(&m, usize::MAX, 0).unwrap(), Point::new(2, 2));
    }

    #[test]
    fn inner_center_single_pixel() {
        let m = BinaryMask::from_points(6, 3, &[(4, 1)]).unwrap();
        assert_eq!(inner_center(&m, 64, 0).unwrap(), Point::new(4, 1));
    }

    // Frozen oracle values, computed by literally summing squared distances
    // over every set pixel with an independent implementation.
    #[test]
    fn inner_center_frozen_values_on_concave_shapes() {
        let cases = [
            (u_shape(), Point::new(2, 4)),
            (l_shape(), Point::new(0, 3)),
            (ring(), Point::new(3, 1)), // four-way symmetric tie → smallest y
            (h_shape(), Point::new(3, 3)),
        ];
        for (mask, expected) in cases {
            let edges = mask_edge_points(&mask).unwrap();
            let got = inner_center(&mask, edges.len(), 0).unwrap();
            assert_eq!(got, expected);
            assert!(mask.get(got.x, got.y), "inner center must be a set pixel");
        }
    }

    #[test]
    fn inner_center_is_set_even_where_centroid_is_not() {
        for mask in [u_shape(), l_shape(), ring()] {
            let c = mask_centroid(&mask).unwrap();
            assert!(!mask.get(c.x, c.y));
            let ic = inner_center(&mask, 64, 3).unwrap();
            assert!(mask.get(ic.x, ic.y));
        }
    }

    #[test]
    fn inner_center_matches_literal_argmin_on_random_masks() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..40 {
            let w = rng.random_range(3..=24);
            let h = rng.random_range(3..=24);
            let mut m = BinaryMask::new(w, h).unwrap();
            for y in 0..h {
                for x in 0..w {
                    if rng.random_range(0.0..1.0) < 0.45 {
                        m.set(x, y, true);
                    }
                }
            }
            if m.is_empty() {
                m.set(0, 0, true);
            }
            let edges = mask_edge_points(&m).unwrap();
            let fast = inner_center(&m, edges.len(), 0).unwrap();

            // Literal triple loop, no algebraic shortcut.
            let mut best: Option<(i128, Point)> = None;
            for p in m.set_points() {
                let mut sum: i128 = 0;
                for e in &edges {
                    let dx = i128::from(p.x) - i128::from(e.x);
                    let dy = i128::from(p.y) - i128::from(e.y);
                    sum += dx * dx + dy * dy;
                }
                if best.is_none_or(|(s, q)| (sum, p.y, p.x) < (s, q.y, q.x)) {
                    best = Some((sum, p));
                }
            }
            assert_eq!(fast, best.unwrap().1);
        }
    }

    #[test]
    fn iou_identity_disjoint_and_partial() {
        let a = BinaryMask::from_points(4, 2, &[(0, 0), (1, 0)]).unwrap();
        assert_eq!(mask_iou(&a, &a).unwrap(), 1.0);

        let b = BinaryMask::from_points(4, 2, &[(2, 1), (3, 1)]).unwrap();
        assert_eq!(mask_iou(&a, &b).unwrap(), 0.0);

        // Two 2-pixel bars sharing exactly one pixel: 1 / 3.
        let c = BinaryMask::from_points(4, 2, &[(1, 0), (2, 0)]).unwrap();
        assert!((mask_iou(&a, &c).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn iou_error_cases() {
        let a = BinaryMask::new(3, 3).unwrap();
        let b = BinaryMask::new(3, 3).unwrap();
        assert!(matches!(mask_iou(&a, &b), Err(Error::BothEmpty)));
        let c = BinaryMask::new(4, 3).unwrap();
        assert!(matches!(mask_iou(&a, &c), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn iou_symmetry_on_random_masks() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut a = BinaryMask::new(10, 10).unwrap();
            let mut b = BinaryMask::new(10, 10).unwrap();
            for y in 0..10 {
                for x in 0..10 {
                    if rng.random_range(0.0..1.0) < 0.5 {
                        a.set(x, y, true);
                    }
                    if rng.random_range(0.0..1.0) < 0.5 {
                        b.set(x, y, true);
                    }
                }
            }
            if a.is_empty() {
                a.set(0, 0, true);
            }
            if b.is_empty() {
                b.set(9, 9, true);
            }
            assert_eq!(mask_iou(&a, &b).unwrap(), mask_iou(&b, &a).unwrap());
        }
    }

    #[test]
    fn difference_carves_pixels() {
        let a = BinaryMask::filled(3, 3).unwrap();
        let b = BinaryMask::from_points(3, 3, &[(1, 1), (2, 2)]).unwrap();
        let d = a.difference(&b).unwrap();
        assert_eq!(d.area(), 7);
        assert!(!d.get(1, 1));
        assert!(!d.get(2, 2));
        assert!(d.get(0, 0));
    }
}
