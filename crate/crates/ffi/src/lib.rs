//! C ABI over the segtrack core.
//!
//! Shape of the API: opaque handles (`stk_mask`, `stk_tracker`) behind
//! pointers, plain `#[repr(C)]` structs for parameters, and an `stk_status`
//! code from every fallible call. Failure details are kept per thread and
//! read back with [`stk_last_error_message`].

#![allow(non_camel_case_types)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use segtrack::loss::Embedding;
use segtrack::mask::{inner_center, mask_bbox, mask_centroid, mask_iou, BinaryMask, BoundingBox};
use segtrack::track::{CostWeights, Detection, KalmanConfig, Tracker, TrackerConfig};
use segtrack::Error;

/// Result code of every fallible call. Zero is success; negative values are
/// errors.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum stk_status {
    /// The call succeeded.
    STK_OK = 0,
    /// A required pointer argument was null.
    STK_NULL_POINTER = -1,
    /// An argument was structurally invalid (zero dims, empty embedding,
    /// non-finite value, mismatched lengths, ...).
    STK_INVALID_ARGUMENT = -2,
    /// A coordinate lay outside the mask.
    STK_OUT_OF_BOUNDS = -3,
    /// The operation itself failed; see stk_last_error_message().
    STK_RUNTIME_ERROR = -4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: stk_status, message: &str) -> stk_status {
    let sanitized: String = message.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("NUL bytes stripped");
    });
    status
}

fn fail_error(err: &Error) -> stk_status {
    let status = match err {
        Error::MaskOutOfBounds(_) | Error::OutOfRange(_) => stk_status::STK_OUT_OF_BOUNDS,
        Error::EmptyMask
        | Error::EmptyInput
        | Error::DimensionMismatch(_)
        | Error::BothEmpty
        | Error::InvalidDims(_)
        | Error::NonFinite(_)
        | Error::InvalidConfig(_) => stk_status::STK_INVALID_ARGUMENT,
        _ => stk_status::STK_RUNTIME_ERROR,
    };
    fail(status, &err.to_string())
}

/// Last error message of the current thread, as a NUL-terminated UTF-8
/// string. Valid until the next failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn stk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Runs a closure, converting any stray panic into STK_RUNTIME_ERROR instead
/// of unwinding across the C boundary.
fn protect(f: impl FnOnce() -> stk_status) -> stk_status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(stk_status::STK_RUNTIME_ERROR, "internal panic"),
    }
}

// ------------------------------------------------------------------ masks

/// Opaque binary mask handle. Create with stk_mask_new, release with
/// stk_mask_free.
pub struct stk_mask {
    inner: BinaryMask,
}

/// Allocates a width x height mask with all pixels clear.
///
/// # Safety
/// `out` must be a valid pointer; on STK_OK it receives an owned handle.
#[no_mangle]
pub unsafe extern "C" fn stk_mask_new(
    width: u32,
    height: u32,
    out: *mut *mut stk_mask,
) -> stk_status {
    if out.is_null() {
        return fail(stk_status::STK_NULL_POINTER, "out is null");
    }
    protect(|| match BinaryMask::new(width, height) {
        Ok(mask) => {
            unsafe { *out = Box::into_raw(Box::new(stk_mask { inner: mask })) };
            stk_status::STK_OK
        }
        Err(e) => fail_error(&e),
    })
}

/// Releases a mask. Passing null is a no-op.
///
/// # Safety
/// `mask` must be a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn stk_mask_free(mask: *mut stk_mask) {
    if !mask.is_null() {
        drop(unsafe { Box::from_raw(mask) });
    }
}

/// Writes the mask's dimensions.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stk_mask_dims(
    mask: *const stk_mask,
    out_width: *mut u32,
    out_height: *mut u32,
) -> stk_status {
    if mask.is_null() || out_width.is_null() || out_height.is_null() {
        return fail(stk_status::STK_NULL_POINTER, "null argument");
    }
    let m = unsafe { &(*mask).inner };
    unsafe {
        *out_width = m.width();
        *out_height = m.height();
    }
    stk_status::STK_OK
}

/// Number of set pixels.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stk_mask_area(mask: *const stk_mask, out: *mut u64) -> stk_status {
    if mask.is_null() || out.is_null() {
        return fail(stk_status::STK_NULL_POINTER, "null argument");
    }
    unsafe { *out = (*mask).inner.area() };
    stk_status::STK_OK
}

/// Sets or clears one pixel.
///
/// # Safety
/// `mask` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn stk_mask_set(
    mask: *mut stk_mask,
    x: u32,
    y: u32,
    value: bool,
) -> stk_status {
    if mask.is_null() {
        return fail(stk_status::STK_NULL_POINTER, "mask is null");
    }
    let m = unsafe { &mut (*mask).inner };
    if x >= m.width() || y >= m.height() {
        return fail(
            stk_status::STK_OUT_OF_BOUNDS,
            &format!("pixel ({x},{y}) outside {}x{} mask", m.width(), m.height()),
        );
    }
    m.set(x, y, value);
    stk_status::STK_OK
}

/// Sets every pixel of the half-open rectangle [x0,x1) x [y0,y1) to `value`.
/// The rectangle must lie inside the mask.
///
/// # Safety
/// `mask` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn stk_mask_fill_rect(
    mask: *mut stk_mask,
    x0: u32,
    y0: u32,
    x1: u32,
    y1: u32,
    value: bool,
) -> stk_status {
    if mask.is_null() {
        return fail(stk_status::STK_NULL_POINTER, "mask is null");
    }
    let m = unsafe { &mut (*mask).inner };
    if x0 > x1 || y0 > y1 || x1 > m.width() || y1 > m.height() {
        return fail(
            stk_status::STK_OUT_OF_BOUNDS,
            &format!(
                "rect [{x0},{y0},{x1},{y1}] does not fit a {}x{} mask",
                m.width(),
                m.height()
            ),
        );
    }
    for y in y0..y1 {
        for x in x0..x1 {
            m.set(x, y, value);
        }
    }
    stk_status::STK_OK
}

/// Reads one pixel.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stk_mask_get(
    mask: *const stk_mask,
    x: u32,
    y: u32,
    out: *mut bool,
) -> stk_status {
    if mask.is_null() || out.is_null() {
        return fail(stk_status::STK_NULL_POINTER, "null argument");
    }
    let m = unsafe { &(*mask).inner };
    if x >= m.width() || y >= m.height() {
        return fail(
            stk_status::STK_OUT_OF_BOUNDS,
            &format!("pixel ({x},{y}) outside {}x{} mask", m.width(), m.height()),
        );
    }
    unsafe { *out = m.get(x, y) };
    stk_status::STK_OK
}

/// Writes the tight bounding box of the set pixels as
/// (x_min, y_min, x_max, y_max), min inclusive, max exclusive. Fails with
/// STK_INVALID_ARGUMENT on an empty mask.
///
/// # Safety
/// `out_ltrb` must point to at least 4 writable u32 values.
#[no_mangle]
pub unsafe extern "C" fn stk_mask_bbox(mask: *const stk_mask, out_ltrb: *mut u32) -> stk_status {
    if mask.is_null() || out_ltrb.is_null() {
        return fail(stk_status::STK_NULL_POINTER, "null argument");
    }
    protect(|| match mask_bbox(unsafe { &(*mask).inner }) {
        Ok(b) => {
            let vals = [b.x_min, b.y_min, b.x_max, b.y_max];
            for (i, v) in vals.iter().enumerate() {
                unsafe { *out_ltrb.add(i) = *v };
            }
            stk_status::STK_OK
        }
        Err(e) => fail_error(&e),
    })
}

/// Writes the rounded centroid of the set pixels. The centroid of a concave
/// mask may land on an unset pixel.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stk_mask_centroid(
    mask: *const stk_mask,
    out_x: *mut u32,
    out_y: *mut u32,
) -> stk_status {
    if mask.is_null() || out_x.is_null() || out_y.is_null() {
        return fail(stk_status::STK_NULL_POINTER, "null argument");
    }
    protect(|| match mask_centroid(unsafe { &(*mask).inner }) {
        Ok(p) => {
            unsafe {
                *out_x = p.x;
                *out_y = p.y;
            }
            stk_status::STK_OK
        }
        Err(e) => fail_error(&e),
    })
}

/// Writes the inner center: the set pixel minimizing the summed squared
/// distance to `k` sampled edge pixels (all of them when `k` is at least the
/// edge count). Unlike the centroid, the result is always a set pixel.
/// Deterministic for a fixed seed.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stk_mask_inner_center(
    mask: *const stk_mask,
    k: usize,
    seed: u64,
    out_x: *mut u32,
    out_y: *mut u32,
) -> stk_status {
    if mask.is_null() || out_x.is_null() || out_y.is_null() {
        return fail(stk_status::STK_NULL_POINTER, "null argument");
    }
    protect(|| match inner_center(unsafe { &(*mask).inner }, k, seed) {
        Ok(p) => {
            unsafe {
                *out_x = p.x;
                *out_y = p.y;
            }
            stk_status::STK_OK
        }
        Err(e) => fail_error(&e),
    })
}

/// Writes the intersection-over-union of two same-sized masks. Both empty
/// is an error.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stk_mask_iou(
    a: *const stk_mask,
    b: *const stk_mask,
    out: *mut f64,
) -> stk_status {
    if a.is_null() || b.is_null() || out.is_null() {
        return fail(stk_status::STK_NULL_POINTER, "null argument");
    }
    protect(
        || match mask_iou(unsafe { &(*a).inner }, unsafe { &(*b).inner }) {
            Ok(v) => {
                unsafe { *out = v };
                stk_status::STK_OK
            }
            Err(e) => fail_error(&e),
        },
    )
}

// --------------------------------------------------------------- tracking

/// Tracker knobs; fill with stk_tracker_params_default, then override.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct stk_tracker_params {
    /// Weight of the embedding (appearance) cost term.
    pub w_emb: f64,
    /// Weight of the box-overlap cost term.
    pub w_iou: f64,
    /// Combined costs above this value can never match.
    pub gate: f64,
    /// Frames a track may stay unmatched before it is dropped.
    pub max_age: u32,
    /// Kept mass of the running track embedding on each match (0..1).
    pub ema_alpha: f64,
    /// Minimum detection score that may start a new track.
    pub spawn_score: f64,
    /// Multiplier on the motion model's process noise (1 = default).
    pub process_noise_scale: f64,
    /// Multiplier on the measurement noise (1 = default).
    pub measurement_noise_scale: f64,
}

fn tracker_config(p: &stk_tracker_params) -> TrackerConfig {
    TrackerConfig {
        weights: CostWeights {
            w_emb: p.w_emb,
            w_iou: p.w_iou,
        },
        gate: p.gate,
        max_age: p.max_age,
        ema_alpha: p.ema_alpha,
        spawn_score: p.spawn_score,
        kalman: KalmanConfig {
            process_noise_scale: p.process_noise_scale,
            measurement_noise_scale: p.measurement_noise_scale,
            ..KalmanConfig::default()
        },
    }
}

/// Fills `out` with the default tracker parameters.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stk_tracker_params_default(out: *mut stk_tracker_params) -> stk_status {
    if out.is_null() {
        return fail(stk_status::STK_NULL_POINTER, "out is null");
    }
    let cfg = TrackerConfig::default();
    unsafe {
        *out = stk_tracker_params {
            w_emb: cfg.weights.w_emb,
            w_iou: cfg.weights.w_iou,
            gate: cfg.gate,
            max_age: cfg.max_age,
            ema_alpha: cfg.ema_alpha,
            spawn_score: cfg.spawn_score,
            process_noise_scale: cfg.kalman.process_noise_scale,
            measurement_noise_scale: cfg.kalman.measurement_noise_scale,
        };
    }
    stk_status::STK_OK
}

/// Opaque tracker handle. Create with stk_tracker_new, release with
/// stk_tracker_free.
pub struct stk_tracker {
    inner: Tracker,
}

/// Creates a tracker. `params` may be null for defaults.
///
/// # Safety
/// `out` must be a valid pointer; on STK_OK it receives an owned handle.
#[no_mangle]
pub unsafe extern "C" fn stk_tracker_new(
    params: *const stk_tracker_params,
    out: *mut *mut stk_tracker,
) -> stk_status {
    if out.is_null() {
        return fail(stk_status::STK_NULL_POINTER, "out is null");
    }
    let config = if params.is_null() {
        TrackerConfig::default()
    } else {
        tracker_config(unsafe { &*params })
    };
    protect(|| match Tracker::new(config) {
        Ok(tracker) => {
            unsafe { *out = Box::into_raw(Box::new(stk_tracker { inner: tracker })) };
            stk_status::STK_OK
        }
        Err(e) => fail_error(&e),
    })
}

/// Releases a tracker. Passing null is a no-op.
///
/// # Safety
/// `tracker` must be a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn stk_tracker_free(tracker: *mut stk_tracker) {
    if !tracker.is_null() {
        drop(unsafe { Box::from_raw(tracker) });
    }
}

/// One detection handed to the tracker. The embedding is `embedding_len`
/// doubles; every detection of a stream must use the same length. `mask` is
/// optional (may be null) and is only borrowed for the call.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct stk_detection {
    /// Box edges in pixels; min inclusive, max exclusive, max > min.
    pub x_min: u32,
    pub y_min: u32,
    pub x_max: u32,
    pub y_max: u32,
    /// Detector confidence in [0, 1].
    pub score: f64,
    pub embedding: *const f64,
    pub embedding_len: usize,
    pub mask: *const stk_mask,
}

/// Feeds one frame of detections and writes the assigned track id for each
/// detection into `out_ids` (same order, `count` entries). An id of 0 means
/// the detection was not associated and did not start a track (score below
/// the spawn threshold); real ids start at 1 and are stable across frames.
///
/// The first call initializes the tracker with the given detections; later
/// calls associate against the live tracks. `frame` indices should be
/// non-decreasing.
///
/// # Safety
/// `detections` must point to `count` valid records whose embedding pointers
/// hold `embedding_len` doubles; `out_ids` must have room for `count` ids.
#[no_mangle]
pub unsafe extern "C" fn stk_tracker_step(
    tracker: *mut stk_tracker,
    frame: u32,
    detections: *const stk_detection,
    count: usize,
    out_ids: *mut u32,
) -> stk_status {
    if tracker.is_null() || (count > 0 && (detections.is_null() || out_ids.is_null())) {
        return fail(stk_status::STK_NULL_POINTER, "null argument");
    }
    let raw = if count == 0 {
        &[]
    } else {
        unsafe { std::slice::from_raw_parts(detections, count) }
    };
    let mut converted: Vec<Detection> = Vec::with_capacity(count);
    for (i, d) in raw.iter().enumerate() {
        if d.embedding.is_null() {
            return fail(
                stk_status::STK_NULL_POINTER,
                &format!("detection {i}: embedding is null"),
            );
        }
        let values = unsafe { std::slice::from_raw_parts(d.embedding, d.embedding_len) };
        let bbox = match BoundingBox::new(d.x_min, d.y_min, d.x_max, d.y_max) {
            Ok(b) => b,
            Err(e) => return fail_error(&e),
        };
        let embedding = match Embedding::new(values.to_vec()) {
            Ok(e) => e,
            Err(e) => return fail_error(&e),
        };
        let mask = if d.mask.is_null() {
            None
        } else {
            Some(unsafe { &(*d.mask).inner }.clone())
        };
        match Detection::new(bbox, d.score, embedding, mask, frame) {
            Ok(det) => converted.push(det),
            Err(e) => return fail_error(&e),
        }
    }
    protect(|| {
        let t = unsafe { &mut (*tracker).inner };
        let pairs = if t.is_initialized() {
            match t.match_frame(&converted) {
                Ok(pairs) => pairs,
                Err(e) => return fail_error(&e),
            }
        } else {
            // Apply the spawn gate on the first frame too, so a weak
            // detection never receives an id regardless of when it arrives.
            let spawn_score = t.config().spawn_score;
            let strong: Vec<usize> = (0..converted.len())
                .filter(|&i| converted[i].score >= spawn_score)
                .collect();
            let subset: Vec<Detection> = strong.iter().map(|&i| converted[i].clone()).collect();
            t.init(&subset)
                .into_iter()
                .map(|(i, id)| (strong[i], id))
                .collect()
        };
        if count > 0 {
            let ids = unsafe { std::slice::from_raw_parts_mut(out_ids, count) };
            ids.fill(0);
            for (det_idx, id) in pairs {
                ids[det_idx] = id;
            }
        }
        stk_status::STK_OK
    })
}

/// Number of live (active or recently lost) tracks.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stk_tracker_live_tracks(
    tracker: *const stk_tracker,
    out: *mut usize,
) -> stk_status {
    if tracker.is_null() || out.is_null() {
        return fail(stk_status::STK_NULL_POINTER, "null argument");
    }
    unsafe { *out = (*tracker).inner.tracks().len() };
    stk_status::STK_OK
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_header_covers_the_surface() {
        let header =
            std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/segtrack.h"))
                .expect("build.rs generates include/segtrack.h");
        for symbol in [
            "typedef struct stk_mask stk_mask;",
            "typedef struct stk_tracker stk_tracker;",
            "stk_mask_inner_center",
            "stk_tracker_step",
            "stk_last_error_message",
            "STK_OK = 0",
        ] {
            assert!(header.contains(symbol), "header lacks {symbol}");
        }
    }

    fn new_mask(w: u32, h: u32) -> *mut stk_mask {
        let mut handle: *mut stk_mask = std::ptr::null_mut();
        assert_eq!(
            unsafe { stk_mask_new(w, h, &mut handle) },
            stk_status::STK_OK
        );
        assert!(!handle.is_null());
        handle
    }

    fn last_error() -> String {
        let ptr = stk_last_error_message();
        unsafe { std::ffi::CStr::from_ptr(ptr) }
            .to_string_lossy()
            .into_owned()
    }

    #[test]
    fn mask_lifecycle_and_geometry() {
        let m = new_mask(32, 32);
        unsafe {
            // A hollow frame: centroid falls in the hole, inner center does not.
            assert_eq!(
                stk_mask_fill_rect(m, 2, 2, 30, 30, true),
                stk_status::STK_OK
            );
            assert_eq!(
                stk_mask_fill_rect(m, 8, 8, 24, 24, false),
                stk_status::STK_OK
            );

            let (mut w, mut h) = (0u32, 0u32);
            assert_eq!(stk_mask_dims(m, &mut w, &mut h), stk_status::STK_OK);
            assert_eq!((w, h), (32, 32));

            let mut area = 0u64;
            assert_eq!(stk_mask_area(m, &mut area), stk_status::STK_OK);
            assert_eq!(area, 28 * 28 - 16 * 16);

            let mut ltrb = [0u32; 4];
            assert_eq!(stk_mask_bbox(m, ltrb.as_mut_ptr()), stk_status::STK_OK);
            assert_eq!(ltrb, [2, 2, 30, 30]);

            let (mut cx, mut cy) = (0u32, 0u32);
            assert_eq!(stk_mask_centroid(m, &mut cx, &mut cy), stk_status::STK_OK);
            let mut on_mask = true;
            assert_eq!(stk_mask_get(m, cx, cy, &mut on_mask), stk_status::STK_OK);
            assert!(!on_mask, "frame centroid should fall in the hole");

            let (mut ix, mut iy) = (0u32, 0u32);
            assert_eq!(
                stk_mask_inner_center(m, 64, 17, &mut ix, &mut iy),
                stk_status::STK_OK
            );
            assert_eq!(stk_mask_get(m, ix, iy, &mut on_mask), stk_status::STK_OK);
            assert!(on_mask, "inner center must be a set pixel");

            stk_mask_free(m);
        }
    }

    #[test]
    fn mask_errors_set_codes_and_messages() {
        unsafe {
            let mut handle: *mut stk_mask = std::ptr::null_mut();
            assert_eq!(
                stk_mask_new(0, 4, &mut handle),
                stk_status::STK_INVALID_ARGUMENT
            );
            assert!(!last_error().is_empty());

            let m = new_mask(8, 8);
            assert_eq!(stk_mask_set(m, 8, 0, true), stk_status::STK_OUT_OF_BOUNDS);
            assert!(last_error().contains("8x8"));

            // Inner center of an all-clear mask is an error, not a crash.
            let (mut x, mut y) = (0u32, 0u32);
            assert_eq!(
                stk_mask_inner_center(m, 64, 17, &mut x, &mut y),
                stk_status::STK_INVALID_ARGUMENT
            );

            let mut v = 0.0f64;
            assert_eq!(
                stk_mask_iou(m, std::ptr::null(), &mut v),
                stk_status::STK_NULL_POINTER
            );
            stk_mask_free(m);
            stk_mask_free(std::ptr::null_mut()); // tolerated
        }
    }

    #[test]
    fn tracker_keeps_identities_across_frames() {
        unsafe {
            let mut params = std::mem::MaybeUninit::<stk_tracker_params>::uninit();
            assert_eq!(
                stk_tracker_params_default(params.as_mut_ptr()),
                stk_status::STK_OK
            );
            let params = params.assume_init();
            assert_eq!(params.w_emb, 0.7);

            let mut tracker: *mut stk_tracker = std::ptr::null_mut();
            assert_eq!(stk_tracker_new(&params, &mut tracker), stk_status::STK_OK);

            let emb_a = [1.0f64, 0.0, 0.0];
            let emb_b = [0.0f64, 1.0, 0.0];
            let det = |x: u32, emb: &[f64]| stk_detection {
                x_min: x,
                y_min: 10,
                x_max: x + 12,
                y_max: 30,
                score: 0.9,
                embedding: emb.as_ptr(),
                embedding_len: emb.len(),
                mask: std::ptr::null(),
            };

            let mut ids = [0u32; 2];
            let frame0 = [det(10, &emb_a), det(60, &emb_b)];
            assert_eq!(
                stk_tracker_step(tracker, 0, frame0.as_ptr(), 2, ids.as_mut_ptr()),
                stk_status::STK_OK
            );
            assert_eq!(ids, [1, 2]);

            // Same objects, slightly moved, listed in swapped order.
            let frame1 = [det(62, &emb_b), det(12, &emb_a)];
            assert_eq!(
                stk_tracker_step(tracker, 1, frame1.as_ptr(), 2, ids.as_mut_ptr()),
                stk_status::STK_OK
            );
            assert_eq!(ids, [2, 1], "identities must follow the embeddings");

            let mut live = 0usize;
            assert_eq!(
                stk_tracker_live_tracks(tracker, &mut live),
                stk_status::STK_OK
            );
            assert_eq!(live, 2);

            // Inconsistent embedding length is rejected cleanly.
            let short = [1.0f64];
            let bad = [det(10, &short)];
            let mut one_id = [0u32; 1];
            assert_ne!(
                stk_tracker_step(tracker, 2, bad.as_ptr(), 1, one_id.as_mut_ptr()),
                stk_status::STK_OK
            );
            assert!(!last_error().is_empty());

            // An empty frame ages the tracks but succeeds.
            assert_eq!(
                stk_tracker_step(tracker, 3, std::ptr::null(), 0, std::ptr::null_mut()),
                stk_status::STK_OK
            );

            stk_tracker_free(tracker);
        }
    }

    #[test]
    fn low_score_detections_do_not_spawn() {
        unsafe {
            let mut tracker: *mut stk_tracker = std::ptr::null_mut();
            assert_eq!(
                stk_tracker_new(std::ptr::null(), &mut tracker),
                stk_status::STK_OK
            );
            let emb = [0.5f64, 0.5];
            let weak = stk_detection {
                x_min: 0,
                y_min: 0,
                x_max: 10,
                y_max: 10,
                score: 0.1, // below the default spawn threshold
                embedding: emb.as_ptr(),
                embedding_len: emb.len(),
                mask: std::ptr::null(),
            };
            let mut id = [7u32; 1];
            assert_eq!(
                stk_tracker_step(tracker, 0, &weak, 1, id.as_mut_ptr()),
                stk_status::STK_OK
            );
            assert_eq!(id[0], 0, "weak detection must not get an id");
            stk_tracker_free(tracker);
        }
    }
}
