/* C interface to plme-lab. Generated by cbindgen; do not edit. */

#ifndef PLME_H
#define PLME_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum PlmeStatus {
  PLME_STATUS_OK = 0,
  PLME_STATUS_NULL_POINTER = 1,
  PLME_STATUS_INVALID_ARGUMENT = 2,
  PLME_STATUS_NUMERICAL = 3,
  PLME_STATUS_INTERNAL = 4,
} PlmeStatus;

// Time series of maps handle.
typedef struct PlmeMapSeries PlmeMapSeries;

// Noise model handle.
typedef struct PlmeNoise PlmeNoise;

// Second- or fourth-order PLME parameters at one time.
typedef struct PlmeParams {
  double t;
  double gamma_plus;
  double gamma_minus;
  // Zero for order 2.
  double gamma_x;
  double phi;
  double h_ren_coeff;
  double theta_tilde;
  int32_t order;
} PlmeParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *plme_version(void);

// Message of the last failed call on this thread, or NULL if none. The
// pointer stays valid until the next failing call on the same thread.
const char *plme_last_error(void);

// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum PlmeStatus plme_noise_quasistatic(double sigma, struct PlmeNoise **out);

// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum PlmeStatus plme_noise_ornstein_uhlenbeck(double sigma, double tau_c, struct PlmeNoise **out);

// `omega_h` bounds the sampled spectrum; analytic parameters use `ω_h → ∞`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum PlmeStatus plme_noise_one_over_f(double sigma,
                                      double omega_l,
                                      double omega_h,
                                      struct PlmeNoise **out);

// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum PlmeStatus plme_noise_white(double diffusion, struct PlmeNoise **out);

// # Safety
// `noise` must be NULL or a handle from a `plme_noise_*` constructor that
// has not been freed.
void plme_noise_free(struct PlmeNoise *noise);

// Autocorrelation `S(t)` of the noise.
//
// # Safety
// `noise` must be a live handle and `out` valid for one write.
enum PlmeStatus plme_noise_autocorr(const struct PlmeNoise *noise, double t, double *out);

// PLME parameters at time `t` for constant drive `omega`. `order` is 2 or 4;
// with 4, `gamma_x` is the weight of `D[σx]` in the fourth-order generator.
//
// # Safety
// `noise` must be a live handle and `out` valid for one write.
enum PlmeStatus plme_params(const struct PlmeNoise *noise,
                            double omega,
                            double t,
                            int32_t order,
                            struct PlmeParams *out);

// Maps of order 0, 2 or 4 under constant drive `omega` at `n_times`
// ascending `times`, integrated to relative tolerance `rtol`.
//
// # Safety
// `noise` must be a live handle, `times` must point to `n_times` doubles and
// `out` must be valid for one write.
enum PlmeStatus plme_maps_compute(const struct PlmeNoise *noise,
                                  double omega,
                                  int32_t order,
                                  const double *times,
                                  size_t n_times,
                                  double rtol,
                                  struct PlmeMapSeries **out);

// Monte Carlo mean maps over `n_traj` realizations with step `dt` and `seed`.
//
// # Safety
// As for [`plme_maps_compute`].
enum PlmeStatus plme_exact_ensemble(const struct PlmeNoise *noise,
                                    double omega,
                                    size_t n_traj,
                                    double dt,
                                    uint64_t seed,
                                    const double *times,
                                    size_t n_times,
                                    struct PlmeMapSeries **out);

// Gauss–Hermite exact maps for quasistatic noise of strength `sigma`.
//
// # Safety
// `times` must point to `n_times` doubles and `out` must be valid for one
// write.
enum PlmeStatus plme_quasistatic_exact(double sigma,
                                       double omega,
                                       const double *times,
                                       size_t n_times,
                                       size_t nodes,
                                       struct PlmeMapSeries **out);

// # Safety
// `series` must be NULL or a live handle.
void plme_map_series_free(struct PlmeMapSeries *series);

// Number of maps in the series; 0 for NULL.
//
// # Safety
// `series` must be NULL or a live handle.
size_t plme_map_series_len(const struct PlmeMapSeries *series);

// Time of map `k`.
//
// # Safety
// `series` must be a live handle and `out` valid for one write.
enum PlmeStatus plme_map_series_time(const struct PlmeMapSeries *series, size_t k, double *out);

// Superoperator `V(t_k)`, written to `re[16]` and `im[16]`.
//
// # Safety
// `series` must be a live handle; `re` and `im` must each hold 16 doubles.
enum PlmeStatus plme_map_series_superop(const struct PlmeMapSeries *series,
                                        size_t k,
                                        double *re,
                                        double *im);

// Deviation `V(t_k) − I`; accurate where `V` is close to the identity.
//
// # Safety
// As for [`plme_map_series_superop`].
enum PlmeStatus plme_map_series_deviation(const struct PlmeMapSeries *series,
                                          size_t k,
                                          double *re,
                                          double *im);

// Standard errors of the Bloch block of map `k`, row-major, 9 doubles.
// Fails unless the series came from [`plme_exact_ensemble`].
//
// # Safety
// `series` must be a live handle and `out` must hold 9 doubles.
enum PlmeStatus plme_map_series_std_err(const struct PlmeMapSeries *series, size_t k, double *out);

// Diamond-norm distance between map `ka` of `a` and map `kb` of `b`.
//
// # Safety
// `a` and `b` must be live handles and `out` valid for one write.
enum PlmeStatus plme_diamond_distance(const struct PlmeMapSeries *a,
                                      size_t ka,
                                      const struct PlmeMapSeries *b,
                                      size_t kb,
                                      double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* PLME_H */
