#ifndef NMSSE_H
#define NMSSE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NmsseStatus {
  NMSSE_STATUS_OK = 0,
  NMSSE_STATUS_NULL_POINTER = 1,
  NMSSE_STATUS_INVALID_UTF8 = 2,
  NMSSE_STATUS_CONFIG = 3,
  NMSSE_STATUS_NUMERICAL = 4,
  NMSSE_STATUS_TRAJECTORY = 5,
  NMSSE_STATUS_IO = 6,
  NMSSE_STATUS_OUT_OF_RANGE = 7,
  NMSSE_STATUS_UNSUPPORTED = 8,
  NMSSE_STATUS_PANIC = 9,
} NmsseStatus;

/**
 * Opaque scenario configuration.
 */
typedef struct NmsseConfig NmsseConfig;

/**
 * Opaque Bloch time series: an ensemble mean, a single trajectory, or a
 * reference curve.
 */
typedef struct NmsseSeries NmsseSeries;

/**
 * One grid point of a Bloch series. Standard errors are 0 for series that
 * have none.
 */
typedef struct NmssePoint {
  double t;
  double x;
  double y;
  double z;
  double norm;
  double x_se;
  double y_se;
  double z_se;
} NmssePoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *nmsse_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nmsse_version(void);

/**
 * New config holding the defaults (coherent actual SSE, delta 2, dt 1e-4,
 * t_final 3, 1000 trajectories, seed 0).
 */
struct NmsseConfig *nmsse_config_new(void);

/**
 * # Safety
 * `config` must come from [`nmsse_config_new`] and not be freed yet, or be
 * NULL.
 */
void nmsse_config_free(struct NmsseConfig *config);

/**
 * Sets one field using config-file keys and values, e.g. `("unraveling",
 * "quadrature")` or `("n_traj", "4000")`.
 *
 * # Safety
 * `config` must be a live handle; `key` and `value` NUL-terminated strings.
 */
enum NmsseStatus nmsse_config_set(struct NmsseConfig *config, const char *key, const char *value);

/**
 * Checks the config without running anything.
 *
 * # Safety
 * `config` must be a live handle.
 */
enum NmsseStatus nmsse_config_validate(const struct NmsseConfig *config);

/**
 * Runs the SSE ensemble described by `config` (mode must be `sse`).
 *
 * # Safety
 * `config` must be a live handle and `out` writable.
 */
enum NmsseStatus nmsse_run_ensemble(const struct NmsseConfig *config, struct NmsseSeries **out);

/**
 * Runs trajectory `index` of the SSE scenario.
 *
 * # Safety
 * `config` must be a live handle and `out` writable.
 */
enum NmsseStatus nmsse_run_trajectory(const struct NmsseConfig *config,
                                      uint64_t index,
                                      struct NmsseSeries **out);

/**
 * Reference curve for the config: the exact solution for `exact` and
 * colored-noise `sse` configs, the Lindblad solution for `master` and
 * Markov `sse` configs.
 *
 * # Safety
 * `config` must be a live handle and `out` writable.
 */
enum NmsseStatus nmsse_run_reference(const struct NmsseConfig *config, struct NmsseSeries **out);

/**
 * # Safety
 * `series` must come from one of the `nmsse_run_*` calls and not be freed
 * yet, or be NULL.
 */
void nmsse_series_free(struct NmsseSeries *series);

/**
 * Number of grid points; 0 for NULL.
 *
 * # Safety
 * `series` must be a live handle or NULL.
 */
size_t nmsse_series_len(const struct NmsseSeries *series);

/**
 * # Safety
 * `series` must be a live handle and `out` writable.
 */
enum NmsseStatus nmsse_series_point(const struct NmsseSeries *series,
                                    size_t index,
                                    struct NmssePoint *out);

/**
 * Smallest eigenvalue of the averaged density matrix at `index`. Only
 * ensemble series carry density matrices.
 *
 * # Safety
 * `series` must be a live handle and `out` writable.
 */
enum NmsseStatus nmsse_series_min_eigenvalue(const struct NmsseSeries *series,
                                             size_t index,
                                             double *out);

/**
 * Writes the series as CSV.
 *
 * # Safety
 * `series` must be a live handle and `path` a NUL-terminated string.
 */
enum NmsseStatus nmsse_series_write_csv(const struct NmsseSeries *series, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NMSSE_H */
