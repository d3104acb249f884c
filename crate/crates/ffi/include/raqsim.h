#ifndef RAQSIM_H
#define RAQSIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define RAQSIM_SYSTEM_RAQ 0

#define RAQSIM_SYSTEM_MMIMO 1

#define RAQSIM_SCHEME_MRC 0

#define RAQSIM_SCHEME_ZF 1

/**
 * Result code of every fallible call.
 */
typedef enum RaqsimStatus {
  RAQSIM_STATUS_OK = 0,
  RAQSIM_STATUS_NULL_POINTER = 1,
  RAQSIM_STATUS_INVALID_UTF8 = 2,
  /**
   * Bad configuration or argument.
   */
  RAQSIM_STATUS_VALIDATION = 3,
  RAQSIM_STATUS_IO = 4,
  RAQSIM_STATUS_DOMAIN = 5,
  /**
   * A solve or inversion failed its conditioning checks.
   */
  RAQSIM_STATUS_NUMERICAL = 6,
  RAQSIM_STATUS_OUT_OF_RANGE = 7,
  /**
   * A Rust panic was caught at the boundary.
   */
  RAQSIM_STATUS_PANIC = 8,
} RaqsimStatus;

/**
 * A validated simulator configuration.
 */
typedef struct RaqsimConfig RaqsimConfig;

/**
 * Rows of a finished sweep.
 */
typedef struct RaqsimTable RaqsimTable;

/**
 * Front-end figures of both receivers at the configured array size.
 */
typedef struct RaqsimFrontend {
  double chi_re;
  double chi_im;
  /**
   * dχ/dΩ_l, s/rad.
   */
  double chi_slope_re;
  double chi_slope_im;
  double probe_output_power_w;
  double gain;
  double cos2_phase;
  double effective_aperture_m2;
  double noise_power_w;
  double mmimo_gain;
  double mmimo_aperture_m2;
  double mmimo_noise_power_w;
  double snr_advantage_db;
} RaqsimFrontend;

typedef struct RaqsimRow {
  /**
   * Grid value of the swept axis (M, K or P_s in dBm).
   */
  double value;
  uint32_t system;
  uint32_t scheme;
  double rate_mc;
  double rate_lb;
  double ci;
  /**
   * False when the point failed; rates are NaN then.
   */
  bool ok;
} RaqsimRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next `raqsim_*` call on this thread.
 */
const char *raqsim_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *raqsim_version(void);

/**
 * Parses and validates a JSON configuration.
 */
enum RaqsimStatus raqsim_config_from_json(const char *json, struct RaqsimConfig **out);

/**
 * Reads, parses and validates a JSON configuration file.
 */
enum RaqsimStatus raqsim_config_load(const char *path, struct RaqsimConfig **out);

/**
 * The built-in default configuration.
 */
enum RaqsimStatus raqsim_config_template(struct RaqsimConfig **out);

void raqsim_config_free(struct RaqsimConfig *cfg);

enum RaqsimStatus raqsim_frontend_report(const struct RaqsimConfig *cfg,
                                         struct RaqsimFrontend *out);

/**
 * Per-user closed-form lower bounds for the configured drop, M, K and P_s.
 * Writes `min(K, capacity)` values to `out` and K to `*users`.
 */
enum RaqsimStatus raqsim_lower_bounds(const struct RaqsimConfig *cfg,
                                      uint32_t system_id,
                                      uint32_t scheme_id,
                                      double *out,
                                      size_t capacity,
                                      size_t *users);

/**
 * Runs `preset` ("fig-M", "fig-K" or "fig-P"). `trials == 0` keeps the
 * configured trial count. Uses the global worker pool.
 */
enum RaqsimStatus raqsim_run_preset(const struct RaqsimConfig *cfg,
                                    const char *preset,
                                    size_t trials,
                                    struct RaqsimTable **out);

/**
 * Number of rows, or 0 for a null table.
 */
size_t raqsim_table_len(const struct RaqsimTable *table);

enum RaqsimStatus raqsim_table_row(const struct RaqsimTable *table,
                                   size_t index,
                                   struct RaqsimRow *out);

/**
 * Writes the table in the same CSV format as the command-line tool.
 */
enum RaqsimStatus raqsim_table_write_csv(const struct RaqsimTable *table, const char *path);

void raqsim_table_free(struct RaqsimTable *table);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RAQSIM_H */
