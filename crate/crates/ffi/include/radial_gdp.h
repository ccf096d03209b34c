#ifndef RADIAL_GDP_H
#define RADIAL_GDP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RgdpStatus {
  RGDP_STATUS_OK = 0,
  RGDP_STATUS_NULL_POINTER = 1,
  RGDP_STATUS_DOMAIN = 2,
  RGDP_STATUS_NUMERICAL = 3,
  RGDP_STATUS_ALIGNMENT = 4,
  RGDP_STATUS_IO = 5,
  RGDP_STATUS_PARSE = 6,
  RGDP_STATUS_CONFIG = 7,
  RGDP_STATUS_BUFFER_TOO_SMALL = 8,
  RGDP_STATUS_INTERNAL = 9,
  RGDP_STATUS_PANIC = 10,
} RgdpStatus;

/**
 * Eigenbasis of the periodic kernel on an `m`-point grid.
 */
typedef struct RgdpBasis RgdpBasis;

/**
 * Penalized mean of a curve sample.
 */
typedef struct RgdpMean RgdpMean;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. Valid until the next
 * failing call on the same thread; never null.
 */
const char *rgdp_last_error_message(void);

/**
 * Builds the eigenbasis of `exp(-(d/rho)^alpha)` on `m` grid points.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum RgdpStatus rgdp_basis_new(size_t m, double rho, double alpha, struct RgdpBasis **out);

/**
 * # Safety
 * `basis` must come from [`rgdp_basis_new`] and not be used afterwards. Null is ignored.
 */
void rgdp_basis_free(struct RgdpBasis *basis);

/**
 * Number of retained modes, or 0 for a null handle.
 *
 * # Safety
 * `basis` must be null or a live handle.
 */
size_t rgdp_basis_num_modes(const struct RgdpBasis *basis);

/**
 * Copies the operator eigenvalues, in decreasing order, into `out`.
 *
 * # Safety
 * `basis` must be a live handle and `out` valid for `len` writes.
 */
enum RgdpStatus rgdp_basis_eigenvalues(const struct RgdpBasis *basis, double *out, size_t len);

/**
 * Penalized mean of `n` curves stored row-major in `curves` (`n * m` values).
 *
 * # Safety
 * `basis` must be a live handle, `curves` valid for `n * m` reads where
 * `m` is the grid size of `basis`, and `out` valid for writes.
 */
enum RgdpStatus rgdp_rkhs_mean_new(const struct RgdpBasis *basis,
                                   const double *curves,
                                   size_t n,
                                   double phi,
                                   struct RgdpMean **out);

/**
 * # Safety
 * `mean` must come from [`rgdp_rkhs_mean_new`] and not be used afterwards. Null is ignored.
 */
void rgdp_rkhs_mean_free(struct RgdpMean *mean);

/**
 * Copies the `m` grid values of the mean into `out`.
 *
 * # Safety
 * `mean` must be a live handle and `out` valid for `len` writes.
 */
enum RgdpStatus rgdp_rkhs_mean_values(const struct RgdpMean *mean, double *out, size_t len);

/**
 * RKHS norm of the mean.
 *
 * # Safety
 * `mean` must be a live handle and `out` valid for writes.
 */
enum RgdpStatus rgdp_rkhs_mean_norm(const struct RgdpMean *mean, double *out);

/**
 * `2 tau / (n sqrt(phi))`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum RgdpStatus rgdp_sensitivity_bound(double tau, size_t n, double phi, double *out);

/**
 * Noise scale `delta_bound / mu`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum RgdpStatus rgdp_calibrate_sigma(double delta_bound, double mu, double *out);

/**
 * Releases `mean + sigma Z` with `sigma = delta_bound / mu`, using the
 * noise stream `(master_seed, stream)`. Writes `m` values to `out`.
 *
 * # Safety
 * `mean` must be a live handle and `out` valid for `len` writes.
 */
enum RgdpStatus rgdp_sanitize(const struct RgdpMean *mean,
                              double delta_bound,
                              double mu,
                              uint64_t master_seed,
                              uint64_t stream,
                              double *out,
                              size_t len);

/**
 * `sqrt(sum mu_i^2)` over `len` budgets.
 *
 * # Safety
 * `mus` must be valid for `len` reads and `out` valid for writes.
 */
enum RgdpStatus rgdp_compose(const double *mus, size_t len, double *out);

/**
 * Smallest `delta` such that a `mu`-GDP mechanism is `(epsilon, delta)`-DP.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum RgdpStatus rgdp_gdp_to_dp_delta(double mu, double epsilon, double *out);

/**
 * `Phi(Phi^-1(1 - alpha) - mu)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum RgdpStatus rgdp_gaussian_tradeoff(double mu, double alpha, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RADIAL_GDP_H */
