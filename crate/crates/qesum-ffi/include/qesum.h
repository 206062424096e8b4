/* C ABI for qesum: exact incomplete quadratic exponential sums over the hypercube. */

#pragma once

/* Generated by cbindgen from the qesum-ffi crate sources; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum QsStatus {
  /**
   * The call succeeded.
   */
  QS_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  QS_STATUS_NULL_POINTER = 1,
  /**
   * An argument was out of range (modulus, moment order, gamma, sigma...).
   */
  QS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The input text could not be parsed.
   */
  QS_STATUS_PARSE_ERROR = 3,
  /**
   * The requested sweep exceeds the evaluation budget or a hard guard.
   */
  QS_STATUS_BUDGET_EXCEEDED = 4,
  /**
   * The operation is defined, but not for these inputs (wrong modulus,
   * sampled family where an exhaustive one is required, ...).
   */
  QS_STATUS_UNSUPPORTED = 5,
  /**
   * An internal invariant failed; report this as a bug.
   */
  QS_STATUS_INTERNAL_ERROR = 6,
} QsStatus;

/**
 * Opaque handle to a parsed polynomial.
 */
typedef struct QsPoly QsPoly;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; never freed.
 */
const char *qs_version(void);

/**
 * A copy of the message for the most recent error on this thread, or NULL
 * if the last call succeeded. Release the copy with `qs_string_free`.
 */
char *qs_last_error_message(void);

/**
 * Release a string returned by this library. NULL is a no-op.
 *
 * # Safety
 * `s` must be NULL or an unreleased string obtained from this library.
 */
void qs_string_free(char *s);

/**
 * Parse polynomial JSON (`{"n":2,"m":3,"a":{"1,2":1},"b":[0,0]}`) into a
 * handle written to `*out`. The caller owns the handle.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` valid for writing.
 */
enum QsStatus qs_poly_parse(const char *json, struct QsPoly **out);

/**
 * Release a polynomial handle. NULL is a no-op.
 *
 * # Safety
 * `p` must be NULL or an unreleased handle from `qs_poly_parse`.
 */
void qs_poly_free(struct QsPoly *p);

/**
 * Number of variables of the polynomial; 0 if `p` is NULL.
 *
 * # Safety
 * `p` must be NULL or a live handle.
 */
uint32_t qs_poly_n(const struct QsPoly *p);

/**
 * Modulus of the polynomial; 0 if `p` is NULL.
 *
 * # Safety
 * `p` must be NULL or a live handle.
 */
uint32_t qs_poly_m(const struct QsPoly *p);

/**
 * Serialize the polynomial back to its canonical JSON form.
 *
 * # Safety
 * `p` must be a live handle; `out` valid for writing one pointer.
 */
enum QsStatus qs_poly_to_json(const struct QsPoly *p, char **out);

/**
 * Evaluate S(f) exactly. Each out-pointer may be NULL to skip that field;
 * `out_exactly_zero` reports the exact cyclotomic zero test, not a float
 * comparison.
 *
 * # Safety
 * `p` must be a live handle; non-NULL out-pointers must be writable.
 */
enum QsStatus qs_eval(const struct QsPoly *p,
                      double *out_norm,
                      double *out_re,
                      double *out_im,
                      bool *out_exactly_zero);

/**
 * The structural constants of modulus `m`: c = floor((m+1)/4) and the
 * algebraic values q = 2cos(pi/2m), r = 2cos(3pi/2m), s = 2cos(pi/m).
 * Out-pointers may be NULL to skip fields.
 *
 * # Safety
 * Non-NULL out-pointers must be writable.
 */
enum QsStatus qs_root_params(uint32_t m,
                             uint32_t *out_c,
                             double *out_q,
                             double *out_r,
                             double *out_s);

/**
 * Full Fourier spectrum of omega^f as CSV (`bitmask,re,im,abs`, one row per
 * subset), written to `*out`.
 *
 * # Safety
 * `p` must be a live handle; `out` valid for writing one pointer.
 */
enum QsStatus qs_spectrum_csv(const struct QsPoly *p, char **out);

/**
 * Search the full quadratic family on (n, m) for its top two |S| classes and
 * write the JSON report to `*out`. `count` = 0 sweeps exhaustively; a
 * positive `count` evaluates that many seeded samples instead.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum QsStatus qs_search_json(uint32_t n,
                             uint32_t m,
                             uint64_t count,
                             uint64_t seed,
                             bool use_symmetry,
                             uint64_t budget,
                             char **out);

/**
 * Exact family moment M_r (r in {2, 4, 6}) over the full or homogeneous
 * family on (n, m); the JSON report carries the exact rational and its
 * decimal expansion.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum QsStatus qs_moment_json(uint32_t n,
                             uint32_t m,
                             uint32_t r,
                             bool homogeneous,
                             uint64_t budget,
                             char **out);

/**
 * Decompose a modulus-3 polynomial into signed parity-free complete sums
 * under the identity pairing and write the JSON decomposition to `*out`.
 *
 * # Safety
 * `p` must be a live handle; `out` valid for writing one pointer.
 */
enum QsStatus qs_decompose_json(const struct QsPoly *p, char **out);

/**
 * Run one numbered verification criterion (1..=13). `*out_passed` receives
 * the verdict and, when `out_json` is non-NULL, `*out_json` receives the
 * full result record.
 *
 * # Safety
 * `out_passed` must be writable; `out_json` NULL or writable.
 */
enum QsStatus qs_verify_criterion(uint32_t id, uint64_t budget, bool *out_passed, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
