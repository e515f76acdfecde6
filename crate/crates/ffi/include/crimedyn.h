#ifndef CRIMEDYN_H
#define CRIMEDYN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; the non-zero values below 5 match the CLI exit codes.
 */
typedef enum CrimedynStatus {
  CRIMEDYN_STATUS_OK = 0,
  /**
   * Malformed or out-of-range input.
   */
  CRIMEDYN_STATUS_VALIDATION = 2,
  /**
   * Mathematically inadmissible, e.g. Lambda <= 0.
   */
  CRIMEDYN_STATUS_INADMISSIBLE = 3,
  /**
   * Solver or eigenvalue failure.
   */
  CRIMEDYN_STATUS_NUMERICAL = 4,
  CRIMEDYN_STATUS_NULL_ARGUMENT = 5,
  /**
   * A Rust panic was caught; this is a bug.
   */
  CRIMEDYN_STATUS_INTERNAL = 6,
} CrimedynStatus;

/**
 * Opaque parameter set.
 */
typedef struct CrimedynParams CrimedynParams;

/**
 * Opaque time series.
 */
typedef struct CrimedynTrajectory CrimedynTrajectory;

typedef struct CrimedynThresholds {
  double lambda;
  double r0;
  /**
   * Published closed form.
   */
  double alpha_star;
  /**
   * Sign change of the quadratic's linear coefficient.
   */
  double alpha_star_consistent;
  double r0_critical;
  double beta_star;
} CrimedynThresholds;

typedef struct CrimedynSolverOptions {
  double rel_tol;
  double abs_tol;
  double output_interval;
  uint64_t max_steps;
} CrimedynSolverOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *crimedyn_last_error(void);

/**
 * Library version, static storage.
 */
const char *crimedyn_version(void);

/**
 * Creates a parameter set from a shipped preset name.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum CrimedynStatus crimedyn_params_preset(const char *name, struct CrimedynParams **out);

/**
 * Parses and validates `name = value` text or JSON.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum CrimedynStatus crimedyn_params_parse(const char *text, struct CrimedynParams **out);

/**
 * # Safety
 * `params` must come from this library and not be used afterwards. Null is ignored.
 */
void crimedyn_params_free(struct CrimedynParams *params);

/**
 * Sets one parameter and re-validates; on failure the handle is unchanged.
 *
 * # Safety
 * `params` must be a live handle; `name` a NUL-terminated string.
 */
enum CrimedynStatus crimedyn_params_set(struct CrimedynParams *params,
                                        const char *name,
                                        double value);

/**
 * # Safety
 * `params` must be a live handle; `name` a NUL-terminated string; `out` writable.
 */
enum CrimedynStatus crimedyn_params_get(const struct CrimedynParams *params,
                                        const char *name,
                                        double *out);

/**
 * # Safety
 * `params` must be a live handle; `out` writable.
 */
enum CrimedynStatus crimedyn_r0(const struct CrimedynParams *params, double *out);

/**
 * # Safety
 * `params` must be a live handle; `out` writable.
 */
enum CrimedynStatus crimedyn_thresholds(const struct CrimedynParams *params,
                                        struct CrimedynThresholds *out);

/**
 * Normalized sensitivity index of R0 to `name`: closed form and central difference.
 *
 * # Safety
 * `params` must be a live handle; `name` a NUL-terminated string; outputs writable.
 */
enum CrimedynStatus crimedyn_sensitivity(const struct CrimedynParams *params,
                                         const char *name,
                                         double *derived,
                                         double *finite_difference);

/**
 * Default solver options.
 */
struct CrimedynSolverOptions crimedyn_solver_defaults(void);

/**
 * Integrates from `y0 = [S1, S2, C, R]` to `t_end`. `options` may be null for defaults.
 *
 * # Safety
 * `params` must be a live handle; `y0` must point to 4 doubles; `out` writable.
 */
enum CrimedynStatus crimedyn_simulate(const struct CrimedynParams *params,
                                      const double *y0,
                                      double t_end,
                                      const struct CrimedynSolverOptions *options,
                                      struct CrimedynTrajectory **out);

/**
 * Number of samples; 0 for null.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t crimedyn_trajectory_len(const struct CrimedynTrajectory *traj);

/**
 * Sample `index`: its time and `[S1, S2, C, R]`.
 *
 * # Safety
 * `traj` must be a live handle; `t` writable; `state` must hold 4 doubles.
 */
enum CrimedynStatus crimedyn_trajectory_get(const struct CrimedynTrajectory *traj,
                                            size_t index,
                                            double *t,
                                            double *state);

/**
 * # Safety
 * `traj` must come from this library and not be used afterwards. Null is ignored.
 */
void crimedyn_trajectory_free(struct CrimedynTrajectory *traj);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRIMEDYN_H */
