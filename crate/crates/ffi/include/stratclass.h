#ifndef STRATCLASS_H
#define STRATCLASS_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Simulation flag: every manipulator is caught.
 */
#define SC_SIM_AUDIT_EVERYONE 1

/**
 * Simulation flag: agents never manipulate.
 */
#define SC_SIM_MANIPULATION_DISABLED 2

/**
 * Status code returned by every fallible call.
 */
typedef enum ScStatus {
  SC_STATUS_OK = 0,
  SC_STATUS_INVALID_ARGUMENT = 1,
  SC_STATUS_INVALID_MODEL = 2,
  SC_STATUS_ILL_POSED = 3,
  SC_STATUS_INTERNAL = 4,
} ScStatus;

/**
 * Opaque population model handle.
 */
typedef struct ScModel ScModel;

/**
 * Aggregate outcome of one simulated round.
 */
typedef struct ScSimulationSummary {
  double manipulation_rate;
  double mean_utility;
  double post_qualification_rate;
  double caught_rate_unqualified;
  double caught_rate_population;
  double acceptance_rate;
} ScSimulationSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the most recent error message on this thread into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length in
 * bytes, or 0 when no error is recorded.
 *
 * # Safety
 * `buf` must point to `len` writable bytes, or be NULL with `len` 0.
 */
uintptr_t sc_last_error(char *buf, uintptr_t len);

/**
 * Builds a Gaussian-family model. Pass NaN for both bounds to use the
 * default search interval. Returns NULL on failure (see `sc_last_error`).
 */
struct ScModel *sc_model_new_gaussian(double alpha,
                                      double q,
                                      double eps,
                                      double u,
                                      double p1_mean,
                                      double p1_std,
                                      double p0_mean,
                                      double p0_std,
                                      double pi_mean,
                                      double pi_std,
                                      double cost_mean,
                                      double cost_std,
                                      double theta_lo,
                                      double theta_hi);

/**
 * Frees a model handle. NULL is ignored.
 *
 * # Safety
 * `model` must be a pointer returned by a constructor and not yet freed.
 */
void sc_model_free(struct ScModel *model);

/**
 * Cost-free utility gap between manipulation and improvement.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum ScStatus sc_net_gap(const struct ScModel *model, double theta, double *out);

/**
 * Probability that an unqualified agent manipulates at `theta`.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum ScStatus sc_manipulation_probability(const struct ScModel *model, double theta, double *out);

/**
 * Decision-maker utility ignoring strategic behavior.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum ScStatus sc_nonstrategic_utility(const struct ScModel *model, double theta, double *out);

/**
 * Decision-maker utility against best-responding agents.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum ScStatus sc_strategic_utility(const struct ScModel *model, double theta, double *out);

/**
 * The three decomposition terms at `theta`.
 *
 * # Safety
 * `model` must be a live handle; `phi1`, `phi2`, `phi3` writable.
 */
enum ScStatus sc_decomposition(const struct ScModel *model,
                               double theta,
                               double *phi1,
                               double *phi2,
                               double *phi3);

/**
 * Maximizes the adjusted objective; writes the optimal threshold and the
 * actual (strategic) utility there.
 *
 * # Safety
 * `model` must be a live handle; `out_theta`, `out_utility` writable.
 */
enum ScStatus sc_optimize(const struct ScModel *model,
                          double k1,
                          double k2,
                          double k3,
                          double *out_theta,
                          double *out_utility);

/**
 * Maximizes the non-strategic objective; writes the optimal threshold and
 * the actual (strategic) utility there.
 *
 * # Safety
 * `model` must be a live handle; `out_theta`, `out_utility` writable.
 */
enum ScStatus sc_optimize_nonstrategic(const struct ScModel *model,
                                       double *out_theta,
                                       double *out_utility);

/**
 * Simulates `n` agents at `theta` with the given flag bitmask
 * (`SC_SIM_*`). Deterministic for a fixed seed.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum ScStatus sc_simulate(const struct ScModel *model,
                          double theta,
                          uintptr_t n,
                          uint64_t seed,
                          uint32_t flags,
                          struct ScSimulationSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STRATCLASS_H */
