#ifndef SUMINT_H
#define SUMINT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a C ABI call.
 */
typedef enum SumintStatus {
  SUMINT_STATUS_OK = 0,
  /**
   * Malformed input, dimension mismatch, or another caller error.
   */
  SUMINT_STATUS_USAGE = 1,
  /**
   * A cone is not generic for the map, or a polytope is not integral.
   */
  SUMINT_STATUS_NOT_GENERIC = 2,
  /**
   * The sum-integral identity or a count check failed.
   */
  SUMINT_STATUS_VERIFICATION_FAILED = 3,
  /**
   * Internal inconsistency between independent computations.
   */
  SUMINT_STATUS_INTERNAL = 4,
  SUMINT_STATUS_NULL_POINTER = 5,
  SUMINT_STATUS_INVALID_UTF8 = 6,
  SUMINT_STATUS_PANIC = 7,
} SumintStatus;

/**
 * Opaque complement map.
 */
typedef struct SumintMap SumintMap;

/**
 * Opaque integral polytope.
 */
typedef struct SumintPolytope SumintPolytope;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call on this thread.
 */
const char *sumint_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void sumint_string_free(char *s);

/**
 * Parses a polytope from `{"vertices": [[...], ...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum SumintStatus sumint_polytope_from_json(const char *json, struct SumintPolytope **out);

/**
 * Ambient dimension of a polytope, or 0 for null.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t sumint_polytope_ambient(const struct SumintPolytope *p);

/**
 * # Safety
 * `p` must be null or a handle not yet freed.
 */
void sumint_polytope_free(struct SumintPolytope *p);

/**
 * The standard inner product on `R^ambient`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SumintStatus sumint_map_standard(size_t ambient, struct SumintMap **out);

/**
 * Parses a complement map from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum SumintStatus sumint_map_from_json(const char *json, struct SumintMap **out);

/**
 * Serializes a map back to JSON.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum SumintStatus sumint_map_to_json(const struct SumintMap *m, char **out);

/**
 * # Safety
 * `m` must be null or a handle not yet freed.
 */
void sumint_map_free(struct SumintMap *m);

/**
 * JSON array with one row per face of `p`: normal cone, `mu` series
 * through `degree`, and its constant term.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum SumintStatus sumint_mu_table_json(const struct SumintPolytope *p,
                                       const struct SumintMap *m,
                                       uint32_t degree,
                                       char **out);

/**
 * Number of lattice points of `p` by the local formula. Fails with
 * `VerificationFailed` if it disagrees with direct enumeration.
 *
 * # Safety
 * Handles must be live; `count` must be writable. `json_out` may be null;
 * otherwise it receives the per-face breakdown.
 */
enum SumintStatus sumint_count(const struct SumintPolytope *p,
                               const struct SumintMap *m,
                               uint64_t *count,
                               char **json_out);

/**
 * Checks the sum-integral identity for `p` along a direction sampled from
 * `seed`, comparing through the default order. The report is written to
 * `out` whether or not the check passes.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum SumintStatus sumint_verify_json(const struct SumintPolytope *p,
                                     const struct SumintMap *m,
                                     uint32_t degree,
                                     uint64_t seed,
                                     char **out);

/**
 * Coefficients of `td(z)` and `T(z)` through `z^order` as
 * `{"todd": [...], "t": [...]}` with rational strings.
 *
 * # Safety
 * `out` must be writable.
 */
enum SumintStatus sumint_todd_json(size_t order, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUMINT_H */
