#ifndef DARKTRIPOD_H
#define DARKTRIPOD_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which resonances contribute to the susceptibility.
 */
#define DT_CHANNELS_BOTH 0

/**
 * Only the `|1> -> |4>` resonance.
 */
#define DT_CHANNELS_PROBE 1

/**
 * Result code of every fallible call.
 */
typedef enum DtStatus {
  DT_STATUS_OK = 0,
  DT_STATUS_NULL_POINTER = 1,
  DT_STATUS_INVALID_ARGUMENT = 2,
  DT_STATUS_PHYSICS_DOMAIN = 3,
  DT_STATUS_NOT_CONVERGED = 4,
  DT_STATUS_IO = 5,
  DT_STATUS_PANIC = 6,
} DtStatus;

/**
 * Opaque system configuration.
 */
typedef struct DtConfig DtConfig;

/**
 * Opaque pulse envelope.
 */
typedef struct DtPulse DtPulse;

typedef struct DtComplex {
  double re;
  double im;
} DtComplex;

typedef struct DtDispersion {
  double n;
  double dn_dnu;
  double n_group;
  /**
   * `0` when the group index vanishes.
   */
  int has_vg;
  double vg_over_c;
} DtDispersion;

typedef struct DtConsistency {
  double tan2phi;
  double vg_control;
  double vg_dispersion;
  double rel_error;
} DtConsistency;

/**
 * Optical coherences of the probe and control transitions.
 */
typedef struct DtCoherences {
  struct DtComplex rho41;
  struct DtComplex rho31;
  struct DtComplex rho42;
  struct DtComplex rho32;
} DtCoherences;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library from the same thread.
 */
const char *dt_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dt_version(void);

/**
 * Cold-gas defaults (`K = 1`, `Omega_C = 2`, `omega21 = 5`, `theta = 0`).
 */
struct DtConfig *dt_config_new(void);

/**
 * Dense-gas defaults (`K = 10`).
 */
struct DtConfig *dt_config_new_dense(void);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DtStatus dt_config_load(const char *path, struct DtConfig **out);

/**
 * # Safety
 * `cfg` must come from a `dt_config_*` constructor and not be used afterwards.
 */
void dt_config_free(struct DtConfig *cfg);

/**
 * Sets one parameter by its configuration-file key (`K`, `Omega_C`, ...).
 * The configuration is left unchanged if the result would be invalid.
 *
 * # Safety
 * `cfg` must be a live handle and `key` a NUL-terminated string.
 */
enum DtStatus dt_config_set(struct DtConfig *cfg, const char *key, double value);

/**
 * # Safety
 * `cfg` must be a live handle, `key` a NUL-terminated string, `out` valid.
 */
enum DtStatus dt_config_get(const struct DtConfig *cfg, const char *key, double *out);

double dt_f_theta(double theta);

double dt_g_theta(double theta);

double dt_negative_velocity_threshold(void);

/**
 * Group velocity in units of `c` from the control law.
 *
 * # Safety
 * `out` must be valid.
 */
enum DtStatus dt_group_velocity(double theta, double tan2phi, double *out);

/**
 * Probe susceptibility at detuning `delta1`.
 *
 * # Safety
 * `cfg` must be a live handle and `out` valid.
 */
enum DtStatus dt_chi(const struct DtConfig *cfg, double delta1, int channel, struct DtComplex *out);

/**
 * Evaluates the susceptibility on `n` detunings. Points on a resonance pole
 * get `valid[i] = 0` and a zero value; other errors abort the scan.
 *
 * # Safety
 * `grid`, `out` and `valid` must each point to `n` elements.
 */
enum DtStatus dt_chi_scan(const struct DtConfig *cfg,
                          const double *grid,
                          size_t n,
                          int channel,
                          struct DtComplex *out,
                          uint8_t *valid);

/**
 * Local-field corrected `eps - 1` for a bare susceptibility.
 *
 * # Safety
 * `out` must be valid.
 */
enum DtStatus dt_local_field(struct DtComplex chi, struct DtComplex *out);

/**
 * # Safety
 * `cfg` must be a live handle and `out` valid.
 */
enum DtStatus dt_dispersion(const struct DtConfig *cfg,
                            double delta1,
                            double h,
                            int channel,
                            struct DtDispersion *out);

/**
 * Control law against dispersive group velocity at line centre.
 *
 * # Safety
 * `cfg` must be a live handle and `out` valid.
 */
enum DtStatus dt_consistency(const struct DtConfig *cfg,
                             double h,
                             int channel,
                             struct DtConsistency *out);

/**
 * Steady state of the coherence equations by direct linear solve.
 *
 * # Safety
 * `cfg` must be a live handle and `out` valid.
 */
enum DtStatus dt_steady_state(const struct DtConfig *cfg,
                              double omega_p,
                              double delta1,
                              struct DtCoherences *out);

/**
 * Time-integrates from zero coherences until stationary or `t_max`.
 * Returns `NotConverged` (with `out` filled) if the state is still moving.
 *
 * # Safety
 * `cfg` must be a live handle and `out` valid.
 */
enum DtStatus dt_evolve(const struct DtConfig *cfg,
                        double omega_p,
                        double delta1,
                        double t_max,
                        struct DtCoherences *out);

/**
 * Gaussian envelope `peak * exp(-t^2 / (2 sigma_t^2))` on `points` samples
 * spanning `±span_sigmas * sigma_t`.
 *
 * # Safety
 * `out` must be valid.
 */
enum DtStatus dt_pulse_gaussian(double sigma_t,
                                size_t points,
                                double span_sigmas,
                                double peak,
                                double carrier_delta1,
                                struct DtPulse **out);

/**
 * # Safety
 * `pulse` must come from this library and not be used afterwards.
 */
void dt_pulse_free(struct DtPulse *pulse);

/**
 * Number of samples, or 0 for a null handle.
 *
 * # Safety
 * `pulse` must be null or a live handle.
 */
size_t dt_pulse_len(const struct DtPulse *pulse);

/**
 * Start time and sample spacing.
 *
 * # Safety
 * `pulse` must be a live handle; `t0` and `dt` valid.
 */
enum DtStatus dt_pulse_time_axis(const struct DtPulse *pulse, double *t0, double *dt);

/**
 * Copies the envelope samples into `buf`, which must hold `n >= len`.
 *
 * # Safety
 * `pulse` must be a live handle and `buf` point to `n` elements.
 */
enum DtStatus dt_pulse_samples(const struct DtPulse *pulse, struct DtComplex *buf, size_t n);

/**
 * Spectral propagation through a slab of length `length` (units of
 * `c/gamma`). The output is in the vacuum-retarded frame.
 *
 * # Safety
 * `pulse` and `cfg` must be live handles and `out` valid.
 */
enum DtStatus dt_propagate(const struct DtPulse *pulse,
                           const struct DtConfig *cfg,
                           double length,
                           int local_field,
                           int channel,
                           struct DtPulse **out);

/**
 * Centroid delay of `output` relative to `input`, and the energy ratio.
 *
 * # Safety
 * Both handles must be live; `delay` and `gain` valid.
 */
enum DtStatus dt_pulse_compare(const struct DtPulse *input,
                               const struct DtPulse *output,
                               double *delay,
                               double *gain);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DARKTRIPOD_H */
