#ifndef STOCHORD_H
#define STOCHORD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum StochordStatus {
  STOCHORD_STATUS_OK = 0,
  STOCHORD_STATUS_NULL_POINTER = 1,
  STOCHORD_STATUS_INVALID_UTF8 = 2,
  STOCHORD_STATUS_INVALID_ARGUMENT = 3,
  STOCHORD_STATUS_OUT_OF_RANGE = 4,
  STOCHORD_STATUS_UNSUPPORTED = 5,
  STOCHORD_STATUS_NUMERIC_FAILURE = 6,
  STOCHORD_STATUS_PANIC = 7,
} StochordStatus;

typedef enum StochordOrder {
  STOCHORD_ORDER_USUAL = 0,
  STOCHORD_ORDER_CONVEX = 1,
  STOCHORD_ORDER_LAPLACE = 2,
} StochordOrder;

typedef enum StochordOutcome {
  STOCHORD_OUTCOME_HOLDS = 0,
  STOCHORD_OUTCOME_FAILS = 1,
  STOCHORD_OUTCOME_INCONCLUSIVE = 2,
} StochordOutcome;

/**
 * Opaque channel (SNR distribution) handle.
 */
typedef struct StochordChannel StochordChannel;

/**
 * Opaque instantaneous-metric handle.
 */
typedef struct StochordMetric StochordMetric;

/**
 * Opaque additive-noise handle.
 */
typedef struct StochordNoise StochordNoise;

/**
 * Opaque topology handle with its per-link channels.
 */
typedef struct StochordTopology StochordTopology;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *stochord_version(void);

/**
 * Message describing the last failure on this thread, or NULL. Valid until
 * the next call into the library from the same thread.
 */
const char *stochord_last_error(void);

/**
 * Parse a channel expression such as `rician(k=2)`.
 *
 * # Safety
 * `expr` must be NUL-terminated; `out` must be writable.
 */
enum StochordStatus stochord_channel_parse(const char *expr, struct StochordChannel **out);

/**
 * # Safety
 * `ch` must come from [`stochord_channel_parse`] or be NULL.
 */
void stochord_channel_free(struct StochordChannel *ch);

/**
 * # Safety
 * Pointers must be valid.
 */
enum StochordStatus stochord_channel_pdf(const struct StochordChannel *ch, double x, double *out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum StochordStatus stochord_channel_cdf(const struct StochordChannel *ch, double x, double *out);

/**
 * `E[exp(-rho X)]`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum StochordStatus stochord_channel_laplace(const struct StochordChannel *ch,
                                             double rho,
                                             double *out);

/**
 * `E[X]`; a divergent mean is reported as `+INFINITY`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum StochordStatus stochord_channel_mean(const struct StochordChannel *ch, double *out);

/**
 * Parse a metric expression such as `mqam(m=16)`.
 *
 * # Safety
 * `expr` must be NUL-terminated; `out` must be writable.
 */
enum StochordStatus stochord_metric_parse(const char *expr, struct StochordMetric **out);

/**
 * # Safety
 * `m` must come from [`stochord_metric_parse`] or be NULL.
 */
void stochord_metric_free(struct StochordMetric *m);

/**
 * Metric value at instantaneous SNR `s`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum StochordStatus stochord_metric_instant(const struct StochordMetric *m, double s, double *out);

/**
 * `E[g(rho X)]` by quadrature.
 *
 * # Safety
 * Pointers must be valid.
 */
enum StochordStatus stochord_average_metric(const struct StochordChannel *ch,
                                            const struct StochordMetric *m,
                                            double rho,
                                            double *out);

/**
 * Ergodic capacity `E[ln(1 + rho X)]` in nats.
 *
 * # Safety
 * Pointers must be valid.
 */
enum StochordStatus stochord_ergodic_capacity(const struct StochordChannel *ch,
                                              double rho,
                                              double *out);

/**
 * Check `X <= Y` in the given order on the default grids. `margin` may be
 * NULL.
 *
 * # Safety
 * Pointers other than `margin` must be valid.
 */
enum StochordStatus stochord_check_order(const struct StochordChannel *x,
                                         const struct StochordChannel *y,
                                         enum StochordOrder order,
                                         enum StochordOutcome *outcome,
                                         double *margin);

/**
 * Topology such as `mrc(3)` whose links are i.i.d. copies of `ch`.
 *
 * # Safety
 * `expr` must be NUL-terminated; other pointers must be valid.
 */
enum StochordStatus stochord_topology_iid(const char *expr,
                                          const struct StochordChannel *ch,
                                          struct StochordTopology **out);

/**
 * # Safety
 * `t` must come from [`stochord_topology_iid`] or be NULL.
 */
void stochord_topology_free(struct StochordTopology *t);

/**
 * Monte Carlo end-to-end average metric; deterministic in `seed`.
 * `stderr_out` may be NULL.
 *
 * # Safety
 * Pointers other than `stderr_out` must be valid.
 */
enum StochordStatus stochord_system_simulate(const struct StochordTopology *t,
                                             const struct StochordMetric *m,
                                             double rho,
                                             uint64_t samples,
                                             uint64_t seed,
                                             double *mean_out,
                                             double *stderr_out);

/**
 * Parse a noise expression such as `sas(alpha=1.6)`.
 *
 * # Safety
 * `expr` must be NUL-terminated; `out` must be writable.
 */
enum StochordStatus stochord_noise_parse(const char *expr, struct StochordNoise **out);

/**
 * # Safety
 * `n` must come from [`stochord_noise_parse`] or be NULL.
 */
void stochord_noise_free(struct StochordNoise *n);

/**
 * BPSK error probability with sign detection at instantaneous SNR `s`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum StochordStatus stochord_noise_conditional_ber(const struct StochordNoise *n,
                                                   double s,
                                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STOCHORD_H */
