/* C interface for the tderiv nest-algebra toolkit. */

#ifndef TDERIV_H
#define TDERIV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define TD_OK 0

#define TD_ERR_INPUT 2

#define TD_ERR_VIOLATION 3

#define TD_ERR_NULL 4

#define TD_ERR_PANIC 5

/**
 * A nest algebra handle. Create with `td_algebra_new`, release with
 * `td_algebra_free`.
 */
typedef struct TdAlgebra TdAlgebra;

/**
 * A linear map on one algebra. Create with `td_map_parse`, release with
 * `td_map_free`.
 */
typedef struct TdMap TdMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last failure message for the current thread, or null when the most
 * recent call succeeded. The pointer stays valid until the next call into
 * this library from the same thread; do not free it.
 */
const char *td_last_error(void);

/**
 * Release a string returned by this library. Null is accepted and ignored.
 *
 * # Safety
 * `s` must be a pointer previously returned by this library and not yet
 * freed.
 */
void td_string_free(char *s);

/**
 * Build the algebra of the nest with cut points `dims[0..len]` (strictly
 * increasing, last entry = ambient size). On success writes a fresh handle
 * to `out`.
 *
 * # Safety
 * `dims` must point to `len` readable entries and `out` must be writable.
 */
int32_t td_algebra_new(const size_t *dims, size_t len, struct TdAlgebra **out);

/**
 * Linear dimension of the algebra (the number of basis matrix units).
 *
 * # Safety
 * `alg` must be a live handle and `out` writable.
 */
int32_t td_algebra_dim(const struct TdAlgebra *alg, size_t *out);

/**
 * Release an algebra handle. Null is accepted and ignored.
 *
 * # Safety
 * `alg` must be a handle from `td_algebra_new`, not yet freed.
 */
void td_algebra_free(struct TdAlgebra *alg);

/**
 * Parse a map for the algebra from matrix text: one row per line, exact
 * scalar entries (`3`, `-1/2`, `1/2+3*i`, ...) separated by whitespace.
 * The matrix must be d x d for the algebra's dimension d.
 *
 * # Safety
 * `alg` must be a live handle, `text` a NUL-terminated string, `out`
 * writable.
 */
int32_t td_map_parse(const struct TdAlgebra *alg, const char *text, struct TdMap **out);

/**
 * Render a map back to the matrix text format accepted by `td_map_parse`.
 *
 * # Safety
 * `map` must be a live handle and `out` writable.
 */
int32_t td_map_format(const struct TdMap *map, char **out);

/**
 * Release a map handle. Null is accepted and ignored.
 *
 * # Safety
 * `map` must be a handle from `td_map_parse`, not yet freed.
 */
void td_map_free(struct TdMap *map);

/**
 * Decide whether (delta, tau) respects zero products and, when it does,
 * complete the pair. Writes a JSON report (verdict, implementing triple or
 * witness, completed map, step trace). Returns 3 — with the report still
 * written — only if the pair is judged infeasible without a witness, which
 * would contradict an internal guarantee.
 *
 * # Safety
 * Both maps must be live handles on the same algebra; `out_json` writable.
 */
int32_t td_solve(const struct TdMap *delta, const struct TdMap *tau, char **out_json);

/**
 * Run the seeded verification sweep (round-trips plus decided controls) on
 * the algebra. `field` is "rational" or "gaussian". Writes a JSON report
 * without a timing field, so equal seeds give byte-equal reports.
 *
 * # Safety
 * `alg` must be a live handle, `field` NUL-terminated, `out_json`
 * writable.
 */
int32_t td_verify(const struct TdAlgebra *alg,
                  const char *field,
                  uint64_t trials,
                  uint64_t seed,
                  char **out_json);

/**
 * Run every specialized checker over `trials` constructed positives and
 * `trials` random negatives. Writes the JSON report even when rows are
 * dirty; a misclassification returns 3 so callers cannot miss it.
 *
 * # Safety
 * Same contract as `td_verify`.
 */
int32_t td_corollaries(const struct TdAlgebra *alg,
                       const char *field,
                       uint64_t trials,
                       uint64_t seed,
                       char **out_json);

/**
 * Replay the four-dimensional contrast algebra: compatibility certificate,
 * completion infeasibility with the forced-value contradiction, the
 * smallest-nest comparison, and the dimension census. Returns 3 if any
 * part leaves its expected script.
 *
 * # Safety
 * `out_json` must be writable.
 */
int32_t td_counterexample(uint64_t samples, uint64_t seed, char **out_json);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TDERIV_H */
