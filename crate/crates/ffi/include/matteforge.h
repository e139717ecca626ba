#ifndef MATTEFORGE_H
#define MATTEFORGE_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MfStatus {
  MF_STATUS_OK = 0,
  MF_STATUS_NULL_POINTER = 1,
  MF_STATUS_INVALID_ARGUMENT = 2,
  MF_STATUS_DIMENSION_MISMATCH = 3,
  MF_STATUS_FORMAT = 4,
  MF_STATUS_IO = 5,
  MF_STATUS_EMPTY_REGION = 6,
  MF_STATUS_INTERNAL = 7,
} MfStatus;

// Trimap or guidance map over {0, 0.5, 1}.
typedef struct MfLabelMap MfLabelMap;

// Alpha matte with values in [0, 1], row-major.
typedef struct MfMatte MfMatte;

typedef struct MfMetricReport {
  double sad;
  double mse;
  double grad;
  double conn;
  // Pixels in the evaluation (unknown) region.
  uint64_t pixels_t;
} MfMetricReport;

typedef struct MfLossBreakdown {
  double l2_known;
  double l1_transition;
  double grad_term;
  double total;
} MfLossBreakdown;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until
// the next call into this library from the same thread.
const char *mf_last_error(void);

// Library version as a static NUL-terminated string.
const char *mf_version(void);

// Copies `width * height` values from `data` into a new matte.
//
// # Safety
// `data` must be valid for `width * height` reads; `out` must be writable.
enum MfStatus mf_matte_new(size_t width, size_t height, const double *data, struct MfMatte **out);

// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum MfStatus mf_matte_read_png(const char *path, struct MfMatte **out);

// # Safety
// `matte` must be a live handle; `path` a NUL-terminated string.
enum MfStatus mf_matte_write_png(const struct MfMatte *matte, const char *path);

// # Safety
// `matte` must be NULL or a live handle.
size_t mf_matte_width(const struct MfMatte *matte);

// # Safety
// `matte` must be NULL or a live handle.
size_t mf_matte_height(const struct MfMatte *matte);

// Borrowed pointer to `width * height` row-major values; valid while the
// handle lives. NULL for a NULL handle.
//
// # Safety
// `matte` must be NULL or a live handle.
const double *mf_matte_data(const struct MfMatte *matte);

// # Safety
// `matte` must be NULL or a handle from this library not yet freed.
void mf_matte_free(struct MfMatte *matte);

// New map from palette bytes (0 = background, 128 = unknown,
// 255 = foreground).
//
// # Safety
// `bytes` must be valid for `width * height` reads; `out` must be writable.
enum MfStatus mf_labelmap_new(size_t width,
                              size_t height,
                              const uint8_t *bytes,
                              struct MfLabelMap **out);

// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum MfStatus mf_labelmap_read_png(const char *path, struct MfLabelMap **out);

// # Safety
// `map` must be a live handle; `path` a NUL-terminated string.
enum MfStatus mf_labelmap_write_png(const struct MfLabelMap *map, const char *path);

// # Safety
// `map` must be NULL or a live handle.
size_t mf_labelmap_width(const struct MfLabelMap *map);

// # Safety
// `map` must be NULL or a live handle.
size_t mf_labelmap_height(const struct MfLabelMap *map);

// Copies the palette bytes into `buf`, which must hold `width * height`.
//
// # Safety
// `map` must be a live handle; `buf` valid for `len` writes.
enum MfStatus mf_labelmap_copy_bytes(const struct MfLabelMap *map, uint8_t *buf, size_t len);

// # Safety
// `map` must be NULL or a handle from this library not yet freed.
void mf_labelmap_free(struct MfLabelMap *map);

// Trimap by eroding the pure-foreground and pure-background sets with
// disks of the given radii.
//
// # Safety
// `alpha` must be a live handle; `out` must be writable.
enum MfStatus mf_make_trimap(const struct MfMatte *alpha,
                             uint32_t fg_shrink,
                             uint32_t bg_shrink,
                             struct MfLabelMap **out);

// Scribble thickness in pixels at a training step under the default schedule.
uint32_t mf_thickness_at(uint64_t step);

// Scribblemap from a trimap at `step` under the default schedule.
//
// # Safety
// `trimap` must be a live handle; `out` must be writable.
enum MfStatus mf_deform(const struct MfLabelMap *trimap,
                        uint64_t step,
                        uint64_t seed,
                        struct MfLabelMap **out);

// Clickmap from a trimap; `diameter` 0 selects the default of 40 px.
//
// # Safety
// `trimap` must be a live handle; `out` must be writable.
enum MfStatus mf_clickmap(const struct MfLabelMap *trimap,
                          uint32_t diameter,
                          uint64_t seed,
                          struct MfLabelMap **out);

// SAD, MSE, Grad and Conn over the unknown region of `trimap`, with the
// default metric constants.
//
// # Safety
// Handles must be live; `out` must be writable.
enum MfStatus mf_evaluate(const struct MfMatte *pred,
                          const struct MfMatte *gt,
                          const struct MfLabelMap *trimap,
                          struct MfMetricReport *out);

// Training loss of `pred` against `gt`, split by the trimap's known and
// unknown regions. `sigma` is the gradient filter scale.
//
// # Safety
// Handles must be live; `out` must be writable.
enum MfStatus mf_matting_loss(const struct MfMatte *pred,
                              const struct MfMatte *gt,
                              const struct MfLabelMap *trimap,
                              double sigma,
                              struct MfLossBreakdown *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MATTEFORGE_H */
