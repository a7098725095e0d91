#ifndef NILKILL_H
#define NILKILL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum NkStatus {
  NK_STATUS_OK = 0,
  NK_STATUS_NULL_ARGUMENT = 1,
  NK_STATUS_INVALID_UTF8 = 2,
  NK_STATUS_PARSE = 3,
  NK_STATUS_INVALID_ALGEBRA = 4,
  NK_STATUS_NUMERICAL = 5,
  NK_STATUS_UNKNOWN_CATALOG_ENTRY = 6,
  NK_STATUS_INVALID_ARGUMENT = 7,
  NK_STATUS_PANIC = 8,
  NK_STATUS_OTHER = 9,
} NkStatus;

/**
 * Solver for [`nk_killing_dim`].
 */
typedef enum NkMethod {
  NK_METHOD_BRUTE = 0,
  NK_METHOD_STRUCTURED = 1,
} NkMethod;

/**
 * Opaque metric Lie algebra.
 */
typedef struct NkAlgebra NkAlgebra;

/**
 * Dimensions of the Killing 2- and 3-form spaces with the data of the
 * decomposition they come from.
 */
typedef struct NkKillingDims {
  size_t dim_k2;
  size_t dim_k3;
  /**
   * Dimension of the abelian factor.
   */
  size_t d;
  /**
   * Irreducible factors with a bi-invariant orthogonal complex structure.
   */
  size_t r2;
  /**
   * Naturally reductive irreducible factors.
   */
  size_t r3;
} NkKillingDims;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses an algebra from the JSON file format and validates it.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a writable pointer.
 */
enum NkStatus nk_algebra_from_json(const char *json, struct NkAlgebra **out);

/**
 * Builds a catalog algebra. `lambda` and `l` parametrize
 * `complex_heisenberg` and `heisenberg`; a negative `d` means no flat
 * summand (for `euclidean` it is the dimension).
 *
 * # Safety
 * `name` must be a nul-terminated string and `out` a writable pointer.
 */
enum NkStatus nk_algebra_catalog(const char *name,
                                 double lambda,
                                 size_t l,
                                 int64_t d,
                                 struct NkAlgebra **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `a` must come from this library and not be used afterwards.
 */
void nk_algebra_free(struct NkAlgebra *a);

/**
 * Dimension of the algebra, 0 for a null handle.
 *
 * # Safety
 * `a` must be null or a live handle.
 */
size_t nk_algebra_dim(const struct NkAlgebra *a);

/**
 * Writes the algebra in the JSON file format.
 *
 * # Safety
 * `a` must be a live handle and `out` a writable pointer.
 */
enum NkStatus nk_algebra_to_json(const struct NkAlgebra *a, char **out);

/**
 * Killing form dimensions from the decomposition.
 *
 * # Safety
 * `a` must be a live handle and `out` a writable pointer.
 */
enum NkStatus nk_killing_dimensions(const struct NkAlgebra *a,
                                    double tol,
                                    struct NkKillingDims *out);

/**
 * Dimension of the space of Killing `degree`-forms. The structured method
 * exists for degrees 2 and 3.
 *
 * # Safety
 * `a` must be a live handle and `out` a writable pointer.
 */
enum NkStatus nk_killing_dim(const struct NkAlgebra *a,
                             size_t degree,
                             enum NkMethod method,
                             double tol,
                             size_t *out);

/**
 * The analysis record as JSON (the `analyze --json` output).
 *
 * # Safety
 * `a` must be a live handle and `out` a writable pointer.
 */
enum NkStatus nk_analyze_json(const struct NkAlgebra *a, double tol, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void nk_string_free(char *s);

/**
 * Message of the last failed call on this thread, empty after a success.
 * Valid until the next call into the library on the same thread.
 */
const char *nk_last_error(void);

/**
 * Library version as a static string.
 */
const char *nk_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NILKILL_H */
