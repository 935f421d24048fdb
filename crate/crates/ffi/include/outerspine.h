#ifndef OUTERSPINE_H
#define OUTERSPINE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OspStatus {
  OSP_STATUS_OK = 0,
  OSP_STATUS_NULL_POINTER = 1,
  OSP_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed word or JSON, bad rank, not an automorphism.
   */
  OSP_STATUS_INVALID_INPUT = 3,
  /**
   * A norm comparison was not decided within the class-length cutoff.
   */
  OSP_STATUS_UNDETERMINED = 4,
  /**
   * A retraction step failed its hypotheses.
   */
  OSP_STATUS_PIPELINE_DEFECT = 5,
  /**
   * Any other internal consistency failure.
   */
  OSP_STATUS_DEFECT = 6,
  OSP_STATUS_PANIC = 7,
} OspStatus;

typedef enum OspVerdict {
  OSP_VERDICT_EMPTY_COMPLEX = 0,
  OSP_VERDICT_CONTRACTIBLE = 1,
} OspVerdict;

/**
 * Opaque marked rose.
 */
typedef struct OspRose OspRose;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Owned by the
 * library; valid until the next call.
 */
const char *osp_last_error(void);

/**
 * The rose sending petal `i` to `images[i]`, written with `a..z` and
 * capitals for inverses.
 *
 * # Safety
 * `images` must point to `n` valid C strings and `out` must be writable.
 */
enum OspStatus osp_rose_new(size_t n, const char *const *images, struct OspRose **out);

/**
 * Parses `{"n": .., "phi": [..]}`.
 *
 * # Safety
 * `json` must be a valid C string and `out` writable.
 */
enum OspStatus osp_rose_from_json(const char *json, struct OspRose **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum OspStatus osp_rose_standard(size_t n, struct OspRose **out);

/**
 * # Safety
 * `rose` must come from this library and not be used afterwards. Null is
 * ignored.
 */
void osp_rose_free(struct OspRose *rose);

/**
 * # Safety
 * `rose` must be a valid handle.
 */
size_t osp_rose_rank(const struct OspRose *rose);

/**
 * JSON text of the rose; release with `osp_string_free`.
 *
 * # Safety
 * `rose` must be a valid handle and `out` writable.
 */
enum OspStatus osp_rose_to_json(const struct OspRose *rose, char **out);

/**
 * # Safety
 * `s` must come from this library. Null is ignored.
 */
void osp_string_free(char *s);

/**
 * Length of the tight loop representing the conjugacy class of `word`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum OspStatus osp_translation_length(const struct OspRose *rose, const char *word, size_t *out);

/**
 * Whether the two roses are the same vertex of the spine.
 *
 * # Safety
 * Pointers must be valid.
 */
enum OspStatus osp_roses_equal(const struct OspRose *a, const struct OspRose *b, bool *out);

/**
 * Writes -1, 0 or 1 as the norm of `a` is smaller, equal or larger. `lmax`
 * of 0 uses the default cutoff.
 *
 * # Safety
 * Pointers must be valid.
 */
enum OspStatus osp_compare_norm(const struct OspRose *a,
                                const struct OspRose *b,
                                size_t lmax,
                                int32_t *out);

/**
 * Number of folds taking the rose to the standard one.
 *
 * # Safety
 * Pointers must be valid.
 */
enum OspStatus osp_fold_count(const struct OspRose *rose, size_t *out);

/**
 * Norm descent; writes the minimal rose reached and the step count.
 *
 * # Safety
 * Pointers must be valid; `out_rose` receives a new handle.
 */
enum OspStatus osp_reduce(const struct OspRose *rose,
                          size_t lmax,
                          struct OspRose **out_rose,
                          size_t *out_steps);

/**
 * Retracts the reductive part of the star of the rose; writes the verdict
 * and the number of retraction steps.
 *
 * # Safety
 * Pointers must be valid.
 */
enum OspStatus osp_contractibility(const struct OspRose *rose,
                                   size_t lmax,
                                   enum OspVerdict *out_verdict,
                                   size_t *out_steps);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OUTERSPINE_H */
