#ifndef CRYOWAVE_H
#define CRYOWAVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CwEngine {
  CW_ENGINE_IMAGES = 0,
  CW_ENGINE_RAYS = 1,
} CwEngine;

typedef enum CwNoiseKind {
  CW_NOISE_KIND_CLASSICAL_KTB = 0,
  CW_NOISE_KIND_PLANCK_NYQUIST = 1,
} CwNoiseKind;

typedef enum CwStatus {
  CW_STATUS_OK = 0,
  CW_STATUS_NULL_POINTER = 1,
  CW_STATUS_INVALID_ARGUMENT = 2,
  CW_STATUS_SCENARIO = 3,
  CW_STATUS_RUNTIME = 4,
  CW_STATUS_IO = 5,
  CW_STATUS_OUT_OF_RANGE = 6,
  CW_STATUS_UNDEFINED_METRIC = 7,
  CW_STATUS_PANIC = 8,
} CwStatus;

/**
 * Parsed scenario.
 */
typedef struct CwScenario CwScenario;

/**
 * Traced links of one simulation.
 */
typedef struct CwSimulation CwSimulation;

/**
 * One multipath component.
 */
typedef struct CwPath {
  double delay_s;
  double amplitude_re;
  double amplitude_im;
  uint32_t bounces;
  double departure[3];
  double arrival[3];
} CwPath;

/**
 * Delay and power summary of one link.
 */
typedef struct CwLinkMetrics {
  double distance_m;
  double mean_delay_s;
  double rms_delay_spread_s;
  double received_energy;
  /**
   * `0` for a single-path link.
   */
  double coherence_bandwidth_hz;
} CwLinkMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *cw_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *cw_last_error_message(void);

/**
 * Estimated resonant dipole length on a substrate, m.
 *
 * # Safety
 * `length_m` must be NULL or valid for writes.
 */
enum CwStatus cw_design_dipole(double center_frequency_hz,
                               double substrate_permittivity,
                               double *length_m);

/**
 * Thermal noise power in `bandwidth_hz`, W.
 *
 * # Safety
 * `power_w` must be NULL or valid for writes.
 */
enum CwStatus cw_noise_power(enum CwNoiseKind kind,
                             double temperature_k,
                             double center_frequency_hz,
                             double bandwidth_hz,
                             double *power_w);

/**
 * SNR of a channel with energy `channel_energy` fed with `p_tx_w`, dB.
 *
 * # Safety
 * `snr` must be NULL or valid for writes.
 */
enum CwStatus cw_snr_db(double channel_energy,
                        double p_tx_w,
                        enum CwNoiseKind kind,
                        double temperature_k,
                        double center_frequency_hz,
                        double bandwidth_hz,
                        double *snr);

/**
 * Reads a scenario file.
 *
 * # Safety
 * `path` must be NULL or a NUL-terminated string; `scenario` must be NULL
 * or valid for writes.
 */
enum CwStatus cw_scenario_load(const char *path, struct CwScenario **scenario);

/**
 * Parses a scenario from JSON text.
 *
 * # Safety
 * `json` must be NULL or a NUL-terminated string; `scenario` must be NULL
 * or valid for writes.
 */
enum CwStatus cw_scenario_from_json(const char *json, struct CwScenario **scenario);

/**
 * Overrides the number of launched rays.
 *
 * # Safety
 * `scenario` must be NULL or a live handle.
 */
enum CwStatus cw_scenario_set_ray_count(struct CwScenario *scenario, size_t ray_count);

/**
 * Overrides the bounce limit of the ray engine.
 *
 * # Safety
 * `scenario` must be NULL or a live handle.
 */
enum CwStatus cw_scenario_set_max_bounces(struct CwScenario *scenario, size_t max_bounces);

/**
 * Releases a scenario. NULL is ignored.
 *
 * # Safety
 * `scenario` must be NULL or a handle not yet freed.
 */
void cw_scenario_free(struct CwScenario *scenario);

/**
 * Validates and traces every link of the scenario. Nothing is written to
 * disk.
 *
 * # Safety
 * `scenario` must be NULL or a live handle; `simulation` must be NULL or
 * valid for writes.
 */
enum CwStatus cw_simulate(const struct CwScenario *scenario, struct CwSimulation **simulation);

/**
 * Releases a simulation. NULL is ignored.
 *
 * # Safety
 * `simulation` must be NULL or a handle not yet freed.
 */
void cw_simulation_free(struct CwSimulation *simulation);

/**
 * Number of engine runs: two when both engines were requested.
 *
 * # Safety
 * `simulation` must be NULL or a live handle; `count` NULL or writable.
 */
enum CwStatus cw_simulation_run_count(const struct CwSimulation *simulation, size_t *count);

/**
 * Engine that produced run `run`.
 *
 * # Safety
 * `simulation` must be NULL or a live handle; `engine` NULL or writable.
 */
enum CwStatus cw_simulation_engine(const struct CwSimulation *simulation,
                                   size_t run,
                                   enum CwEngine *engine);

/**
 * Number of links (receivers) in run `run`.
 *
 * # Safety
 * `simulation` must be NULL or a live handle; `count` NULL or writable.
 */
enum CwStatus cw_simulation_link_count(const struct CwSimulation *simulation,
                                       size_t run,
                                       size_t *count);

/**
 * Link label such as `A-B1`, owned by the simulation handle. NULL when the
 * indices are out of range.
 *
 * # Safety
 * `simulation` must be NULL or a live handle.
 */
const char *cw_simulation_link_label(const struct CwSimulation *simulation,
                                     size_t run,
                                     size_t link);

/**
 * Number of paths on a link.
 *
 * # Safety
 * `simulation` must be NULL or a live handle; `count` NULL or writable.
 */
enum CwStatus cw_simulation_path_count(const struct CwSimulation *simulation,
                                       size_t run,
                                       size_t link_index,
                                       size_t *count);

/**
 * Path `index` of a link, in order of increasing delay.
 *
 * # Safety
 * `simulation` must be NULL or a live handle; `path` NULL or writable.
 */
enum CwStatus cw_simulation_path(const struct CwSimulation *simulation,
                                 size_t run,
                                 size_t link_index,
                                 size_t index,
                                 struct CwPath *path);

/**
 * Delay statistics and received energy of a link. Fails with
 * `UndefinedMetric` when the link received no paths.
 *
 * # Safety
 * `simulation` must be NULL or a live handle; `metrics` NULL or writable.
 */
enum CwStatus cw_simulation_link_metrics(const struct CwSimulation *simulation,
                                         size_t run,
                                         size_t link_index,
                                         struct CwLinkMetrics *metrics);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRYOWAVE_H */
