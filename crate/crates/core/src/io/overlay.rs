//! Overlay rendering: masks and boxes drawn over a dark background into a
//! binary portable pixmap (P6), with a deterministic id → color mapping so
//! one identity keeps one color across all frames of a video.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mask::{BinaryMask, BoundingBox};

/// Background gray level.
const BACKGROUND: u8 = 32;
/// Opacity of mask fills over whatever is beneath them.
const MASK_ALPHA: f64 = 0.55;
/// Saturation and value of instance colors.
const COLOR_S: f64 = 0.85;
const COLOR_V: f64 = 0.95;

/// One instance to draw: a filled mask, an outlined box, or both.
#[derive(Debug, Clone)]
pub struct OverlayItem {
    pub id: u32,
    pub mask: Option<BinaryMask>,
    pub bbox: Option<BoundingBox>,
}

/// Deterministic instance color: hues step around the wheel by the golden
/// ratio per id, from a starting angle scrambled by the palette seed.
pub fn id_color(id: u32, palette_seed: u64) -> [u8; 3] {
    // High bits of a golden-ratio multiplicative hash → offset in [0, 1).
    let offset =
        (palette_seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 40) as f64 / (1u64 << 24) as f64;
    let hue = (offset + f64::from(id) * 0.618_033_988_749_895).fract();
    hsv_to_rgb(hue, COLOR_S, COLOR_V)
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let h6 = (h.fract() + 1.0).fract() * 6.0;
    let sector = h6 as u32 % 6;
    let f = h6 - h6.floor();
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    let (r, g, b) = match sector {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    [to_byte(r), to_byte(g), to_byte(b)]
}

fn to_byte(x: f64) -> u8 {
    (x * 255.0).round().clamp(0.0, 255.0) as u8
}

/// Renders one frame as P6 pixmap bytes.
///
/// Items are drawn in ascending id order (ties keep input order), so pixels
/// contested by overlapping masks end up showing the highest id. Each item
/// first alpha-blends its mask fill, then draws its 1-pixel box outline in
/// the solid instance color.
pub fn render_overlay(
    width: u32,
    height: u32,
    items: &[OverlayItem],
    palette_seed: u64,
) -> Result<Vec<u8>> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidDims(format!(
            "overlay dims {width}x{height} must be positive"
        )));
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by_key(|&i| items[i].id);

    let npix = width as usize * height as usize;
    let mut rgb = vec![BACKGROUND; npix * 3];
    for &i in &order {
        let item = &items[i];
        let color = id_color(item.id, palette_seed);
        if let Some(mask) = &item.mask {
            if mask.width() != width || mask.height() != height {
                return Err(Error::DimensionMismatch(format!(
                    "mask for id {} is {}x{}, frame is {width}x{height}",
                    item.id,
                    mask.width(),
                    mask.height()
                )));
            }
            for y in 0..height {
                for x in 0..width {
                    if mask.get(x, y) {
                        let at = 3 * (y as usize * width as usize + x as usize);
                        for ch in 0..3 {
                            let under = f64::from(rgb[at + ch]);
                            let over = f64::from(color[ch]);
                            rgb[at + ch] =
                                to_byte((MASK_ALPHA * over + (1.0 - MASK_ALPHA) * under) / 255.0);
                        }
                    }
                }
            }
        }
        if let Some(bbox) = &item.bbox {
            if bbox.x_max > width || bbox.y_max > height {
                return Err(Error::DimensionMismatch(format!(
                    "box for id {} exceeds the {width}x{height} frame",
                    item.id
                )));
            }
            let mut paint = |x: u32, y: u32| {
                let at = 3 * (y as usize * width as usize + x as usize);
                rgb[at..at + 3].copy_from_slice(&color);
            };
            for x in bbox.x_min..bbox.x_max {
                paint(x, bbox.y_min);
                paint(x, bbox.y_max - 1);
            }
            for y in bbox.y_min..bbox.y_max {
                paint(bbox.x_min, y);
                paint(bbox.x_max - 1, y);
            }
        }
    }

    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(&rgb);
    Ok(out)
}

/// Renders and writes one frame to `path`.
pub fn save_overlay(
    path: impl AsRef<Path>,
    width: u32,
    height: u32,
    items: &[OverlayItem],
    palette_seed: u64,
) -> Result<()> {
    let bytes = render_overlay(width, height, items, palette_seed)?;
    fs::write(path.as_ref(), bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect_mask(w: u32, h: u32, x0: u32, y0: u32, x1: u32, y1: u32) -> BinaryMask {
        let mut m = BinaryMask::new(w, h).unwrap();
        for y in y0..y1 {
            for x in x0..x1 {
                m.set(x, y, true);
            }
        }
        m
    }

    fn pixel(bytes: &[u8], width: u32, x: u32, y: u32) -> [u8; 3] {
        let header_end = bytes.iter().filter(|&&b| b == b'\n').take(3).count();
        assert_eq!(header_end, 3);
        let data_start = bytes
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == b'\n')
            .nth(2)
            .unwrap()
            .0
            + 1;
        let at = data_start + 3 * (y as usize * width as usize + x as usize);
        [bytes[at], bytes[at + 1], bytes[at + 2]]
    }

    #[test]
    fn empty_item_list_renders_background_only() {
        let bytes = render_overlay(4, 3, &[], 17).unwrap();
        assert!(bytes.starts_with(b"P6\n4 3\n255\n"));
        let data = &bytes[b"P6\n4 3\n255\n".len()..];
        assert_eq!(data.len(), 4 * 3 * 3);
        assert!(data.iter().all(|&b| b == BACKGROUND));
    }

    #[test]
    fn same_id_and_seed_always_get_the_same_color() {
        assert_eq!(id_color(5, 17), id_color(5, 17));
        assert_ne!(id_color(5, 17), id_color(6, 17));
        assert_ne!(id_color(5, 17), id_color(5, 18));
    }

    #[test]
    fn rendering_is_deterministic() {
        let items = vec![OverlayItem {
            id: 2,
            mask: Some(rect_mask(8, 8, 1, 1, 5, 5)),
            bbox: Some(BoundingBox::new(1, 1, 5, 5).unwrap()),
        }];
        assert_eq!(
            render_overlay(8, 8, &items, 3).unwrap(),
            render_overlay(8, 8, &items, 3).unwrap()
        );
    }

    #[test]
    fn mask_pixels_blend_over_background() {
        let items = vec![OverlayItem {
            id: 1,
            mask: Some(rect_mask(6, 6, 2, 2, 4, 4)),
            bbox: None,
        }];
        let bytes = render_overlay(6, 6, &items, 0).unwrap();
        let color = id_color(1, 0);
        let expected: Vec<u8> = color
            .iter()
            .map(|&c| {
                to_byte(
                    (MASK_ALPHA * f64::from(c) + (1.0 - MASK_ALPHA) * f64::from(BACKGROUND))
                        / 255.0,
                )
            })
            .collect();
        assert_eq!(pixel(&bytes, 6, 3, 3).to_vec(), expected);
        assert_eq!(pixel(&bytes, 6, 0, 0), [BACKGROUND; 3]);
    }

    #[test]
    fn higher_ids_draw_over_lower_ids() {
        let a = OverlayItem {
            id: 1,
            mask: Some(rect_mask(6, 6, 0, 0, 4, 4)),
            bbox: None,
        };
        let b = OverlayItem {
            id: 2,
            mask: Some(rect_mask(6, 6, 2, 2, 6, 6)),
            bbox: None,
        };
        // Input order must not matter: id decides the z-order.
        let fwd = render_overlay(6, 6, &[a.clone(), b.clone()], 9).unwrap();
        let rev = render_overlay(6, 6, &[b, a], 9).unwrap();
        assert_eq!(fwd, rev);
        // A pixel only in the overlap: blended first with 1, then with 2.
        let c1 = id_color(1, 9);
        let c2 = id_color(2, 9);
        let mut expected = [0u8; 3];
        for ch in 0..3 {
            let after1 = to_byte(
                (MASK_ALPHA * f64::from(c1[ch]) + (1.0 - MASK_ALPHA) * f64::from(BACKGROUND))
                    / 255.0,
            );
            expected[ch] = to_byte(
                (MASK_ALPHA * f64::from(c2[ch]) + (1.0 - MASK_ALPHA) * f64::from(after1)) / 255.0,
            );
        }
        assert_eq!(pixel(&fwd, 6, 3, 3), expected);
    }

    #[test]
    fn box_outline_is_solid_color_over_the_mask() {
        let items = vec![OverlayItem {
            id: 4,
            mask: Some(rect_mask(8, 8, 2, 2, 6, 6)),
            bbox: Some(BoundingBox::new(2, 2, 6, 6).unwrap()),
        }];
        let bytes = render_overlay(8, 8, &items, 17).unwrap();
        assert_eq!(pixel(&bytes, 8, 2, 2), id_color(4, 17)); // corner: outline
        assert_ne!(pixel(&bytes, 8, 4, 4), id_color(4, 17)); // interior: blend
    }

    #[test]
    fn wrong_mask_dims_are_rejected() {
        let items = vec![OverlayItem {
            id: 1,
            mask: Some(rect_mask(4, 4, 0, 0, 2, 2)),
            bbox: None,
        }];
        assert!(matches!(
            render_overlay(6, 6, &items, 0),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
