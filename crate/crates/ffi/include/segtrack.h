/*
 * C ABI for the segtrack core: binary-mask geometry (including the inner
 * center), and Kalman+Hungarian multi-object tracking over embedding and
 * overlap costs.
 *
 * Conventions:
 *   - every fallible call returns stk_status; STK_OK is 0
 *   - on failure, stk_last_error_message() describes the error (thread-local)
 *   - objects returned through out-pointers are owned by the caller and must
 *     be released with the matching *_free function
 *   - pointers passed in are borrowed for the duration of the call only
 */

#ifndef SEGTRACK_H
#define SEGTRACK_H

/* Generated by cbindgen from segtrack-ffi. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call. Zero is success; negative values are
 * errors.
 */
enum stk_status
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  /**
   * The call succeeded.
   */
  STK_OK = 0,
  /**
   * A required pointer argument was null.
   */
  STK_NULL_POINTER = -1,
  /**
   * An argument was structurally invalid (zero dims, empty embedding,
   * non-finite value, mismatched lengths, ...).
   */
  STK_INVALID_ARGUMENT = -2,
  /**
   * A coordinate lay outside the mask.
   */
  STK_OUT_OF_BOUNDS = -3,
  /**
   * The operation itself failed; see stk_last_error_message().
   */
  STK_RUNTIME_ERROR = -4,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum stk_status stk_status;
#else
typedef int32_t stk_status;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/**
 * Opaque binary mask handle. Create with stk_mask_new, release with
 * stk_mask_free.
 */
typedef struct stk_mask stk_mask;

/**
 * Opaque tracker handle. Create with stk_tracker_new, release with
 * stk_tracker_free.
 */
typedef struct stk_tracker stk_tracker;

/**
 * Tracker knobs; fill with stk_tracker_params_default, then override.
 */
typedef struct stk_tracker_params {
  /**
   * Weight of the embedding (appearance) cost term.
   */
  double w_emb;
  /**
   * Weight of the box-overlap cost term.
   */
  double w_iou;
  /**
   * Combined costs above this value can never match.
   */
  double gate;
  /**
   * Frames a track may stay unmatched before it is dropped.
   */
  uint32_t max_age;
  /**
   * Kept mass of the running track embedding on each match (0..1).
   */
  double ema_alpha;
  /**
   * Minimum detection score that may start a new track.
   */
  double spawn_score;
  /**
   * Multiplier on the motion model's process noise (1 = default).
   */
  double process_noise_scale;
  /**
   * Multiplier on the measurement noise (1 = default).
   */
  double measurement_noise_scale;
} stk_tracker_params;

/**
 * One detection handed to the tracker. The embedding is `embedding_len`
 * doubles; every detection of a stream must use the same length. `mask` is
 * optional (may be null) and is only borrowed for the call.
 */
typedef struct stk_detection {
  /**
   * Box edges in pixels; min inclusive, max exclusive, max > min.
   */
  uint32_t x_min;
  uint32_t y_min;
  uint32_t x_max;
  uint32_t y_max;
  /**
   * Detector confidence in [0, 1].
   */
  double score;
  const double *embedding;
  size_t embedding_len;
  const struct stk_mask *mask;
} stk_detection;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message of the current thread, as a NUL-terminated UTF-8
 * string. Valid until the next failing call on the same thread; never null.
 */
const char *stk_last_error_message(void);

/**
 * Allocates a width x height mask with all pixels clear.
 *
 * # Safety
 * `out` must be a valid pointer; on STK_OK it receives an owned handle.
 */
stk_status stk_mask_new(uint32_t width, uint32_t height, struct stk_mask **out);

/**
 * Releases a mask. Passing null is a no-op.
 *
 * # Safety
 * `mask` must be a handle from this library that has not been freed.
 */
void stk_mask_free(struct stk_mask *mask);

/**
 * Writes the mask's dimensions.
 *
 * # Safety
 * All pointers must be valid.
 */
stk_status stk_mask_dims(const struct stk_mask *mask, uint32_t *out_width, uint32_t *out_height);

/**
 * Number of set pixels.
 *
 * # Safety
 * All pointers must be valid.
 */
stk_status stk_mask_area(const struct stk_mask *mask, uint64_t *out);

/**
 * Sets or clears one pixel.
 *
 * # Safety
 * `mask` must be a valid handle.
 */
stk_status stk_mask_set(struct stk_mask *mask, uint32_t x, uint32_t y, bool value);

/**
 * Sets every pixel of the half-open rectangle [x0,x1) x [y0,y1) to `value`.
 * The rectangle must lie inside the mask.
 *
 * # Safety
 * `mask` must be a valid handle.
 */
stk_status stk_mask_fill_rect(struct stk_mask *mask,
                              uint32_t x0,
                              uint32_t y0,
                              uint32_t x1,
                              uint32_t y1,
                              bool value);

/**
 * Reads one pixel.
 *
 * # Safety
 * All pointers must be valid.
 */
stk_status stk_mask_get(const struct stk_mask *mask, uint32_t x, uint32_t y, bool *out);

/**
 * Writes the tight bounding box of the set pixels as
 * (x_min, y_min, x_max, y_max), min inclusive, max exclusive. Fails with
 * STK_INVALID_ARGUMENT on an empty mask.
 *
 * # Safety
 * `out_ltrb` must point to at least 4 writable u32 values.
 */
stk_status stk_mask_bbox(const struct stk_mask *mask, uint32_t *out_ltrb);

/**
 * Writes the rounded centroid of the set pixels. The centroid of a concave
 * mask may land on an unset pixel.
 *
 * # Safety
 * All pointers must be valid.
 */
stk_status stk_mask_centroid(const struct stk_mask *mask, uint32_t *out_x, uint32_t *out_y);

/**
 * Writes the inner center: the set pixel minimizing the summed squared
 * distance to `k` sampled edge pixels (all of them when `k` is at least the
 * edge count). Unlike the centroid, the result is always a set pixel.
 * Deterministic for a fixed seed.
 *
 * # Safety
 * All pointers must be valid.
 */
stk_status stk_mask_inner_center(const struct stk_mask *mask,
                                 size_t k,
                                 uint64_t seed,
                                 uint32_t *out_x,
                                 uint32_t *out_y);

/**
 * Writes the intersection-over-union of two same-sized masks. Both empty
 * is an error.
 *
 * # Safety
 * All pointers must be valid.
 */
stk_status stk_mask_iou(const struct stk_mask *a, const struct stk_mask *b, double *out);

/**
 * Fills `out` with the default tracker parameters.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
stk_status stk_tracker_params_default(struct stk_tracker_params *out);

/**
 * Creates a tracker. `params` may be null for defaults.
 *
 * # Safety
 * `out` must be a valid pointer; on STK_OK it receives an owned handle.
 */
stk_status stk_tracker_new(const struct stk_tracker_params *params, struct stk_tracker **out);

/**
 * Releases a tracker. Passing null is a no-op.
 *
 * # Safety
 * `tracker` must be a handle from this library that has not been freed.
 */
void stk_tracker_free(struct stk_tracker *tracker);

/**
 * Feeds one frame of detections and writes the assigned track id for each
 * detection into `out_ids` (same order, `count` entries). An id of 0 means
 * the detection was not associated and did not start a track (score below
 * the spawn threshold); real ids start at 1 and are stable across frames.
 *
 * The first call initializes the tracker with the given detections; later
 * calls associate against the live tracks. `frame` indices should be
 * non-decreasing.
 *
 * # Safety
 * `detections` must point to `count` valid records whose embedding pointers
 * hold `embedding_len` doubles; `out_ids` must have room for `count` ids.
 */
stk_status stk_tracker_step(struct stk_tracker *tracker,
                            uint32_t frame,
                            const struct stk_detection *detections,
                            size_t count,
                            uint32_t *out_ids);

/**
 * Number of live (active or recently lost) tracks.
 *
 * # Safety
 * All pointers must be valid.
 */
stk_status stk_tracker_live_tracks(const struct stk_tracker *tracker, size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEGTRACK_H */
