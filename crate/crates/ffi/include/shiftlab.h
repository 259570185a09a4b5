#ifndef SHIFTLAB_H
#define SHIFTLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible entry point.
typedef enum ShiftlabStatus {
  ShiftlabStatus_Ok = 0,
  ShiftlabStatus_NullPointer = 1,
  ShiftlabStatus_InvalidArgument = 2,
  ShiftlabStatus_NumericError = 3,
  ShiftlabStatus_BudgetExceeded = 4,
} ShiftlabStatus;

// Opaque dataset handle.
typedef struct ShiftlabDataset ShiftlabDataset;

// Opaque shift-density handle.
typedef struct ShiftlabDensity ShiftlabDensity;

// Opaque truncated Fourier series handle.
typedef struct ShiftlabSeries ShiftlabSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static C string.
const char *shiftlab_version(void);

// Allocate a zero series with the given cutoff.
struct ShiftlabSeries *shiftlab_series_new(size_t cutoff);

// # Safety
// `handle` must come from a `shiftlab_series_*` constructor and not have
// been freed.
void shiftlab_series_free(struct ShiftlabSeries *handle);

// Set the coefficient at frequency `l`.
//
// # Safety
// `handle` must be a live series handle.
enum ShiftlabStatus shiftlab_series_set(struct ShiftlabSeries *handle,
                                        int64_t l,
                                        double re,
                                        double im);

// Read the coefficient at frequency `l` (zero outside the band).
//
// # Safety
// `handle` must be live; `re` and `im` must be writable.
enum ShiftlabStatus shiftlab_series_get(const struct ShiftlabSeries *handle,
                                        int64_t l,
                                        double *re,
                                        double *im);

// New series rotated by the circular shift `phi`.
//
// # Safety
// `handle` must be live.
struct ShiftlabSeries *shiftlab_series_shift(const struct ShiftlabSeries *handle, double phi);

// L2 distance between two series.
//
// # Safety
// Both handles must be live; `out` writable.
enum ShiftlabStatus shiftlab_series_l2_distance(const struct ShiftlabSeries *a,
                                                const struct ShiftlabSeries *b,
                                                double *out);

// L2, H1 and Sobolev-s norms.
//
// # Safety
// `handle` live; output pointers writable.
enum ShiftlabStatus shiftlab_series_norms(const struct ShiftlabSeries *handle,
                                          double s,
                                          double *l2,
                                          double *h1,
                                          double *sobolev);

// Uniform density on `grid_len` points.
struct ShiftlabDensity *shiftlab_density_uniform(size_t grid_len);

// Density from nonnegative grid values (normalized internally). Returns
// null when the values are not a valid density.
//
// # Safety
// `values` must point to `len` readable doubles.
struct ShiftlabDensity *shiftlab_density_from_values(const double *values, size_t len);

// # Safety
// `handle` must come from a density constructor and not have been freed.
void shiftlab_density_free(struct ShiftlabDensity *handle);

// Density value at a point of the circle.
//
// # Safety
// `handle` live; `out` writable.
enum ShiftlabStatus shiftlab_density_value_at(const struct ShiftlabDensity *handle,
                                              double tau,
                                              double *out);

// Sobolev seminorm of the density.
//
// # Safety
// `handle` live; `out` writable.
enum ShiftlabStatus shiftlab_density_sobolev(const struct ShiftlabDensity *handle,
                                             double nu,
                                             double *out);

// Wasserstein-1 distance between densities on the same grid.
//
// # Safety
// Both handles live; `out` writable.
enum ShiftlabStatus shiftlab_w1_distance(const struct ShiftlabDensity *a,
                                         const struct ShiftlabDensity *b,
                                         double *out);

// Generate a synthetic dataset from the truth `(f0, g0)`.
//
// # Safety
// Both handles live.
struct ShiftlabDataset *shiftlab_dataset_generate(const struct ShiftlabSeries *f0,
                                                  const struct ShiftlabDensity *g0,
                                                  size_t n,
                                                  size_t cutoff,
                                                  uint64_t seed);

// # Safety
// `handle` must come from `shiftlab_dataset_generate` and not be freed.
void shiftlab_dataset_free(struct ShiftlabDataset *handle);

// Number of curves.
//
// # Safety
// `handle` live.
size_t shiftlab_dataset_len(const struct ShiftlabDataset *handle);

// Total log likelihood of the dataset under `(f, g)` with `quad` mixture
// nodes.
//
// # Safety
// All handles live; `out` writable.
enum ShiftlabStatus shiftlab_dataset_loglik(const struct ShiftlabDataset *data,
                                            const struct ShiftlabSeries *f,
                                            const struct ShiftlabDensity *g,
                                            size_t quad,
                                            double *out);

// `A_n(a) = 2 pi I_n(a)` by the ascending series.
//
// # Safety
// `out` writable.
enum ShiftlabStatus shiftlab_bessel_a(uint32_t n, double a, double *out);

// Identifiability weight integral `I_n(theta1)`.
//
// # Safety
// `out` writable.
enum ShiftlabStatus shiftlab_lower_bound_integral(uint32_t n, double theta1, double *out);

// Marginal total variation at frequency `k` between the laws `(fa, ga)`
// and `(fb, gb)`, by the default polar quadrature.
//
// # Safety
// All handles live; `out` writable.
enum ShiftlabStatus shiftlab_tv_marginal(int64_t k,
                                         const struct ShiftlabSeries *fa,
                                         const struct ShiftlabDensity *ga,
                                         const struct ShiftlabSeries *fb,
                                         const struct ShiftlabDensity *gb,
                                         double *out);

// Sequential Monte Carlo estimate of the bridge small-ball probability
// `P(sup |B| <= eps)`.
//
// # Safety
// `p_hat` and `stderr` writable.
enum ShiftlabStatus shiftlab_smallball_bridge(double eps,
                                              size_t reps,
                                              size_t grid_len,
                                              uint64_t seed,
                                              double *p_hat,
                                              double *stderr);

// The Fano information bound `alpha/2 (1 - (beta + log 2)/log r)`.
//
// # Safety
// `out` writable.
enum ShiftlabStatus shiftlab_fano_bound(double alpha, double beta, size_t r, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SHIFTLAB_H */
