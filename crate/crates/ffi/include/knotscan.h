#ifndef KNOTSCAN_H
#define KNOTSCAN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  KS_STATUS_OK = 0,
  KS_STATUS_NULL_ARGUMENT = 1,
  KS_STATUS_INVALID_UTF8 = 2,
  KS_STATUS_PARSE = 3,
  KS_STATUS_INVALID_DIAGRAM = 4,
  KS_STATUS_IO = 5,
  /**
   * A pipeline stage failed; the message names it.
   */
  KS_STATUS_STAGE = 6,
  KS_STATUS_PANIC = 7,
} KsStatus;

/**
 * A grayscale raster.
 */
typedef struct KsImage KsImage;

/**
 * A validated PD code.
 */
typedef struct KsPd KsPd;

/**
 * A knot table indexed by Jones polynomial.
 */
typedef struct KsTable KsTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next failing call on the same thread.
 */
const char *ks_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed once.
 */
void ks_string_free(char *s);

/**
 * Parses and validates `PD[X[..],...]` text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` a writable pointer.
 */
KsStatus ks_pd_parse(const char *text, KsPd **out);

/**
 * # Safety
 * `pd` must be NULL or a handle from this library, freed once.
 */
void ks_pd_free(KsPd *pd);

/**
 * # Safety
 * `pd` must be a live handle; `out` writable.
 */
KsStatus ks_pd_crossings(const KsPd *pd, size_t *out);

/**
 * # Safety
 * `pd` must be a live handle; `out` writable.
 */
KsStatus ks_pd_writhe(const KsPd *pd, int32_t *out);

/**
 * Canonical PD text.
 *
 * # Safety
 * `pd` must be a live handle; `out` writable.
 */
KsStatus ks_pd_to_string(const KsPd *pd, char **out);

/**
 * Jones polynomial as canonical text, e.g. `-q^-4+q^-3+q^-1`.
 *
 * # Safety
 * `pd` must be a live handle; `out` writable.
 */
KsStatus ks_jones(const KsPd *pd, char **out);

/**
 * The shipped table, indexed for knots up to `c0` crossings.
 *
 * # Safety
 * `out` must be writable.
 */
KsStatus ks_table_builtin(size_t c0, KsTable **out);

/**
 * A table from a CSV file with header `name,crossing_number,pd`.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` writable.
 */
KsStatus ks_table_load(const char *path, size_t c0, KsTable **out);

/**
 * # Safety
 * `table` must be NULL or a handle from this library, freed once.
 */
void ks_table_free(KsTable *table);

/**
 * Classification report for a diagram as JSON. A search miss is not an
 * error: inspect the report's stages.
 *
 * # Safety
 * Handles must be live; `out` writable.
 */
KsStatus ks_classify_pd(const KsTable *table, const KsPd *pd, char **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` writable.
 */
KsStatus ks_image_load_png(const char *path, KsImage **out);

/**
 * # Safety
 * `img` must be a live handle; `path` a NUL-terminated string.
 */
KsStatus ks_image_save_png(const KsImage *img, const char *path);

/**
 * # Safety
 * `img` must be a live handle; outputs writable.
 */
KsStatus ks_image_size(const KsImage *img, size_t *width, size_t *height);

/**
 * # Safety
 * `img` must be NULL or a handle from this library, freed once.
 */
void ks_image_free(KsImage *img);

/**
 * Draws the diagram in broken-understrand style (`solid` = 0) or with
 * both strands continuous.
 *
 * # Safety
 * `pd` must be a live handle; `out` writable.
 */
KsStatus ks_render(const KsPd *pd,
                   size_t size,
                   double stroke,
                   double gap,
                   uint64_t seed,
                   bool solid,
                   KsImage **out);

/**
 * # Safety
 * `img` must be a live handle; `out` writable.
 */
KsStatus ks_count_crossings(const KsImage *img, size_t *out);

/**
 * Reconstructs a diagram from an image; `gap` is the expected under-strand
 * gap in pixels (6 for default renders).
 *
 * # Safety
 * `img` must be a live handle; `out` writable.
 */
KsStatus ks_image_to_pd(const KsImage *img, double gap, KsPd **out);

/**
 * Full pipeline report as JSON, in the same shape as `knotscan identify
 * --json`. Returns `Stage` with the report still written when a stage
 * fails.
 *
 * # Safety
 * Handles must be live; `out` writable.
 */
KsStatus ks_identify_image(const KsTable *table, const KsImage *img, double gap, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KNOTSCAN_H */
