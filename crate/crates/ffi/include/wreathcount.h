#ifndef WREATHCOUNT_H
#define WREATHCOUNT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WcMode {
  WC_MODE_EXACT = 0,
  WC_MODE_STATISTICAL = 1,
} WcMode;

typedef enum WcStatus {
  WC_STATUS_OK = 0,
  WC_STATUS_NULL_POINTER = 1,
  WC_STATUS_PARSE = 2,
  WC_STATUS_INVALID_ARGUMENT = 3,
  WC_STATUS_CAP_EXCEEDED = 4,
  WC_STATUS_BUFFER_TOO_SMALL = 5,
  WC_STATUS_INTERNAL = 6,
} WcStatus;

typedef enum WcVerdict {
  WC_VERDICT_CERTIFIED_EQUAL = 0,
  WC_VERDICT_CERTIFIED_PROPER = 1,
  WC_VERDICT_CONSISTENT_WITH_W = 2,
  WC_VERDICT_INCONCLUSIVE = 3,
} WcVerdict;

/**
 * Branching shape of a rooted tree.
 */
typedef struct WcShape WcShape;

/**
 * Composite tower of a specialization.
 */
typedef struct WcTower WcTower;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *wc_status_message(enum WcStatus status);

/**
 * Parses a shape such as "2,2".
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum WcStatus wc_shape_parse(const char *text, struct WcShape **out);

/**
 * # Safety
 * `shape` must come from `wc_shape_parse` and not be used afterwards. Null is ignored.
 */
void wc_shape_free(struct WcShape *shape);

/**
 * Number of leaves N of the tree.
 *
 * # Safety
 * `shape` must be a live handle.
 */
size_t wc_shape_leaves(const struct WcShape *shape);

/**
 * Number of coefficients of a specialization for this shape.
 *
 * # Safety
 * `shape` must be a live handle.
 */
size_t wc_shape_coefficient_count(const struct WcShape *shape);

/**
 * Order of the iterated wreath product, as a decimal string.
 *
 * # Safety
 * `shape` must be a live handle; `buf` must hold `len` bytes.
 */
enum WcStatus wc_shape_group_order(const struct WcShape *shape,
                                   char *buf,
                                   size_t len,
                                   size_t *needed);

/**
 * Lower-bound exponent for the shape as "p/q".
 *
 * # Safety
 * `shape` must be a live handle; `buf` must hold `len` bytes.
 */
enum WcStatus wc_shape_exponent(const struct WcShape *shape, char *buf, size_t len, size_t *needed);

/**
 * Group invariants as JSON, enumerating at most `cap` elements.
 *
 * # Safety
 * `shape` must be a live handle; `buf` must hold `len` bytes.
 */
enum WcStatus wc_shape_invariants_json(const struct WcShape *shape,
                                       uint64_t cap,
                                       char *buf,
                                       size_t len,
                                       size_t *needed);

/**
 * Builds the tower of a specialization with `len` coefficients.
 *
 * # Safety
 * `shape` must be a live handle, `alpha` must point to `len` values and `out` be valid.
 */
enum WcStatus wc_tower_new(const struct WcShape *shape,
                           const int64_t *alpha,
                           size_t len,
                           struct WcTower **out);

/**
 * # Safety
 * `tower` must come from `wc_tower_new` and not be used afterwards. Null is ignored.
 */
void wc_tower_free(struct WcTower *tower);

/**
 * Top composite F as comma-separated coefficients, constant term first.
 *
 * # Safety
 * `tower` must be a live handle; `buf` must hold `len` bytes.
 */
enum WcStatus wc_tower_polynomial(const struct WcTower *tower,
                                  char *buf,
                                  size_t len,
                                  size_t *needed);

/**
 * Recovers the specialization from the tower's lower composites into `out[0..len]`.
 *
 * # Safety
 * `tower` must be a live handle and `out` must hold `len` values.
 */
enum WcStatus wc_tower_recover_alpha(const struct WcTower *tower, int64_t *out, size_t len);

/**
 * Certifies the Galois group of the tower's composite with default parameters.
 *
 * # Safety
 * `tower` must be a live handle and `verdict` a valid pointer.
 */
enum WcStatus wc_tower_certify(const struct WcTower *tower,
                               enum WcMode mode,
                               uint64_t seed,
                               enum WcVerdict *verdict);

/**
 * Degree of the splitting field of a squarefree integer polynomial
 * given by `len` coefficients, constant term first.
 *
 * # Safety
 * `coeffs` must point to `len` values and `out` be a valid pointer.
 */
enum WcStatus wc_splitting_degree(const int64_t *coeffs, size_t len, uint64_t cap, uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WREATHCOUNT_H */
