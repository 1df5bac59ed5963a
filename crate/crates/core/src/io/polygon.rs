//! Polygon rasterization with the even-odd fill rule, evaluated at pixel
//! centers. A mask may be described by several rings; regions covered by an
//! odd number of rings are filled, so nested rings cut holes and disjoint
//! rings union.

use crate::error::{Error, Result};
use crate::mask::BinaryMask;

/// One closed ring as a flat `[x0, y0, x1, y1, …]` coordinate list; the
/// last vertex connects back to the first.
pub type Ring = Vec<f64>;

fn check_ring(ring: &[f64]) -> Result<()> {
    if ring.len() < 6 || !ring.len().is_multiple_of(2) {
        return Err(Error::Schema(format!(
            "polygon ring needs an even number of coordinates and at least 3 vertices, got {} values",
            ring.len()
        )));
    }
    if ring.iter().any(|v| !v.is_finite()) {
        return Err(Error::Schema("polygon coordinates must be finite".into()));
    }
    Ok(())
}

/// Edges of a ring crossing the horizontal line `y = py`, as the x
/// coordinates of the crossings. The strict `>` test on both endpoints
/// makes vertices on the line count for exactly one of their two edges.
fn crossings_at(ring: &[f64], py: f64, out: &mut Vec<f64>) {
    let n = ring.len() / 2;
    for i in 0..n {
        let (x1, y1) = (ring[2 * i], ring[2 * i + 1]);
        let j = (i + 1) % n;
        let (x2, y2) = (ring[2 * j], ring[2 * j + 1]);
        if (y1 > py) != (y2 > py) {
            out.push(x1 + (py - y1) * (x2 - x1) / (y2 - y1));
        }
    }
}

/// Rasterizes rings into a `width`×`height` mask.
///
/// A pixel `(x, y)` is set when its center `(x + 0.5, y + 0.5)` lies inside
/// under the even-odd rule: the count of ring-edge crossings strictly left
/// of the center is odd.
pub fn rasterize_polygons(rings: &[Ring], width: u32, height: u32) -> Result<BinaryMask> {
    for ring in rings {
        check_ring(ring)?;
    }
    let mut mask = BinaryMask::new(width, height)?;
    let mut xs: Vec<f64> = Vec::new();
    for y in 0..height {
        let py = f64::from(y) + 0.5;
        xs.clear();
        for ring in rings {
            crossings_at(ring, py, &mut xs);
        }
        xs.sort_by(|a, b| a.partial_cmp(b).expect("finite crossings"));
        // Between crossings 2k and 2k+1 the parity is odd: pixel centers
        // with xs[2k] < x + 0.5 <= xs[2k+1] are inside.
        for pair in xs.chunks_exact(2) {
            let first = (pair[0] - 0.5).floor() + 1.0;
            let last = (pair[1] - 0.5).floor();
            if last < 0.0 || first > f64::from(width - 1) || first > last {
                continue;
            }
            let x0 = first.max(0.0) as u32;
            let x1 = last.min(f64::from(width - 1)) as u32;
            for x in x0..=x1 {
                mask.set(x, y, true);
            }
        }
    }
    Ok(mask)
}
