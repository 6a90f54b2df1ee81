#ifndef TROPICOUNT_H
#define TROPICOUNT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum TcStatus {
  TC_STATUS_OK = 0,
  TC_STATUS_NULL_POINTER = 1,
  /**
   * Malformed input: JSON, rationals, sequences or dimension counts.
   */
  TC_STATUS_INVALID_INPUT = 2,
  /**
   * The conditions are not in general position, or resampling gave up.
   */
  TC_STATUS_NOT_GENERIC = 3,
  /**
   * Index outside the curve list.
   */
  TC_STATUS_OUT_OF_RANGE = 4,
  TC_STATUS_INTERNAL = 5,
  TC_STATUS_PANIC = 6,
} TcStatus;

/**
 * Parsed problem: degree, mode and conditions.
 */
typedef struct TcProblem TcProblem;

/**
 * Result of a count.
 */
typedef struct TcReport TcReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static string.
 */
const char *tc_version(void);

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *tc_last_error(void);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void tc_string_free(char *s);

/**
 * Relative broccoli invariant N^d(α, β, s) as an exact rational string.
 * `alpha` and `beta` are comma-separated weight sequences such as "0,1".
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum TcStatus tc_invariant(uint32_t d, const char *alpha, const char *beta, uint32_t s, char **out);

/**
 * Parse a problem document (the CLI's JSON problem format).
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be writable.
 */
enum TcStatus tc_problem_from_json(const char *json, struct TcProblem **out);

/**
 * # Safety
 * `p` must come from [`tc_problem_from_json`] and not have been freed.
 */
void tc_problem_free(struct TcProblem *p);

/**
 * Count curves. A problem with a "seed" key counts through random
 * conditions drawn from that seed; otherwise its own conditions are used.
 *
 * # Safety
 * `p` must be a live problem handle; `out` must be writable.
 */
enum TcStatus tc_count(const struct TcProblem *p, struct TcReport **out);

/**
 * # Safety
 * `r` must come from [`tc_count`] and not have been freed.
 */
void tc_report_free(struct TcReport *r);

/**
 * Total count as an exact rational string.
 *
 * # Safety
 * `r` must be a live report handle; `out` must be writable.
 */
enum TcStatus tc_report_value(const struct TcReport *r, char **out);

/**
 * Number of contributing curves.
 *
 * # Safety
 * `r` must be a live report handle; `out` must be writable.
 */
enum TcStatus tc_report_curve_count(const struct TcReport *r, size_t *out);

/**
 * Multiplicity of curve `index` as an exact rational string.
 *
 * # Safety
 * `r` must be a live report handle; `out` must be writable.
 */
enum TcStatus tc_report_curve_multiplicity(const struct TcReport *r, size_t index, char **out);

/**
 * Canonical type encoding of curve `index`.
 *
 * # Safety
 * `r` must be a live report handle; `out` must be writable.
 */
enum TcStatus tc_report_curve_encoding(const struct TcReport *r, size_t index, char **out);

/**
 * SVG drawing of all curves, default bounding box.
 *
 * # Safety
 * `r` must be a live report handle; `out` must be writable.
 */
enum TcStatus tc_report_svg(const struct TcReport *r, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TROPICOUNT_H */
