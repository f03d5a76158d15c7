#ifndef CORNERLAB_H
#define CORNERLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared by all entry points.
 */
typedef enum ClStatus {
  CL_STATUS_OK = 0,
  CL_STATUS_NULL_POINTER = 1,
  CL_STATUS_ARGUMENT = 2,
  CL_STATUS_NOT_A_ROOT = 3,
  CL_STATUS_ROOT_MULTIPLICITY = 4,
  CL_STATUS_DEGREE = 5,
  CL_STATUS_N_TOO_SMALL = 6,
  CL_STATUS_WORK_BUDGET = 7,
  CL_STATUS_GRID_RESOLUTION = 8,
  CL_STATUS_NOT_A_BASIS = 9,
  CL_STATUS_PARSE = 10,
  CL_STATUS_IO = 11,
  CL_STATUS_OVERFLOW = 12,
  CL_STATUS_UTF8 = 13,
  CL_STATUS_PANIC = 14,
} ClStatus;

/**
 * Opaque grid function on [n]^2.
 */
typedef struct ClGrid ClGrid;

/**
 * Opaque integer polynomial.
 */
typedef struct ClPoly ClPoly;

/**
 * Opaque W-trick context.
 */
typedef struct ClWTrick ClWTrick;

/**
 * Result of a counting operator.
 */
typedef struct ClOperatorResult {
  double value_re;
  double value_im;
  double normalization;
  double count_equivalent;
  double path_agreement_error;
} ClOperatorResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

uint32_t cl_version(void);

/**
 * Static, NUL-terminated name of a status code.
 */
const char *cl_status_name(enum ClStatus status);

/**
 * The all-ones function on [n]^2.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ClStatus cl_grid_ones(uintptr_t n, struct ClGrid **out);

/**
 * A grid from n*n values in row-major order (index x*n + y); `im` may be null.
 *
 * # Safety
 * `re` (and `im` when non-null) must point to n*n doubles; `out` must be valid.
 */
enum ClStatus cl_grid_new(uintptr_t n, const double *re, const double *im, struct ClGrid **out);

/**
 * # Safety
 * `grid` must come from this library or be null.
 */
void cl_grid_free(struct ClGrid *grid);

/**
 * # Safety
 * `grid` and `out` must be valid.
 */
enum ClStatus cl_grid_size(const struct ClGrid *grid, uintptr_t *out);

/**
 * Parses "c0+c1*z+c2*z^2".
 *
 * # Safety
 * `src` must be NUL-terminated; `out` must be valid.
 */
enum ClStatus cl_poly_parse(const char *src, struct ClPoly **out);

/**
 * # Safety
 * `p` must come from this library or be null.
 */
void cl_poly_free(struct ClPoly *p);

/**
 * # Safety
 * `p` and `out` must be valid.
 */
enum ClStatus cl_poly_degree(const struct ClPoly *p, uintptr_t *out);

/**
 * Builds the W-trick context of P at root rho with W the product of primes below w.
 *
 * # Safety
 * `p` and `out` must be valid.
 */
enum ClStatus cl_wtrick_new(const struct ClPoly *p, int64_t rho, double w, struct ClWTrick **out);

/**
 * # Safety
 * `ctx` must come from this library or be null.
 */
void cl_wtrick_free(struct ClWTrick *ctx);

/**
 * Coefficient j of P~ as a 64-bit integer.
 *
 * # Safety
 * `ctx` and `out` must be valid.
 */
enum ClStatus cl_wtrick_coeff(const struct ClWTrick *ctx, uintptr_t j, int64_t *out);

/**
 * K = floor((N / W_d)^{1/d}).
 *
 * # Safety
 * `ctx` and `out` must be valid.
 */
enum ClStatus cl_wtrick_k(const struct ClWTrick *ctx, uint64_t n, uintptr_t *out);

/**
 * # Safety
 * All pointers must be valid.
 */
enum ClStatus cl_lambda_corners(const struct ClGrid *f0,
                                const struct ClGrid *f1,
                                const struct ClGrid *f2,
                                uintptr_t n,
                                struct ClOperatorResult *out);

/**
 * # Safety
 * All pointers must be valid.
 */
enum ClStatus cl_lambda_w(const struct ClGrid *f0,
                          const struct ClGrid *f1,
                          const struct ClGrid *f2,
                          const struct ClWTrick *ctx,
                          uintptr_t n,
                          struct ClOperatorResult *out);

/**
 * # Safety
 * All pointers must be valid.
 */
enum ClStatus cl_lambda_model(const struct ClGrid *f0,
                              const struct ClGrid *f1,
                              const struct ClGrid *f2,
                              uintptr_t n,
                              uint32_t d,
                              struct ClOperatorResult *out);

/**
 * # Safety
 * All pointers must be valid.
 */
enum ClStatus cl_lambda_star(const struct ClGrid *f0,
                             const struct ClGrid *f1,
                             const struct ClGrid *f2,
                             const struct ClWTrick *ctx,
                             uintptr_t n,
                             struct ClOperatorResult *out);

/**
 * value_pow of the box norm described by `spec`, e.g. "e1:4;e2:4".
 *
 * # Safety
 * `grid`, `spec` and `out` must be valid.
 */
enum ClStatus cl_box_norm(const struct ClGrid *grid, const char *spec, double budget, double *out);

/**
 * S(xi) = sum_{z in [K]} e(xi Q(z)).
 *
 * # Safety
 * `q`, `re` and `im` must be valid.
 */
enum ClStatus cl_weyl_sum(const struct ClPoly *q, uintptr_t k, double xi, double *re, double *im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CORNERLAB_H */
