#ifndef QDMOL_QDMOL_H
#define QDMOL_QDMOL_H

/*
 * C interface of the quantum-dot molecule simulator.
 *
 * Handles are opaque and owned by the caller; free them with the matching
 * *_free function. Every call returns a qdmol_status; on failure the
 * message and a JSON error document are available from qdmol_last_error()
 * and qdmol_last_error_json() on the same thread until the next call.
 * Strings returned through `const char**` stay valid until the owning handle
 * is freed or the next call on it.
 *
 * Units: nm, ps, meV, mV/nm, THz.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QDMOL_API __declspec(dllexport)
#else
#define QDMOL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qdmol_status {
  QDMOL_OK = 0,
  QDMOL_INVALID_ARGUMENT = 1,
  QDMOL_CONFIG = 2,
  QDMOL_GRID_TOO_SMALL = 3,
  QDMOL_NO_CONVERGENCE = 4,
  QDMOL_DEGENERATE_SPLITTING = 5,
  QDMOL_OVERLAPPING_SUPPORT = 6,
  QDMOL_STEP_TOO_LARGE = 7,
  QDMOL_ZERO_COUPLING = 8,
  QDMOL_INSUFFICIENT_SPLITTING = 9,
  QDMOL_ADDRESSING_COLLISION = 10,
  QDMOL_GRID_MISMATCH = 11,
  QDMOL_QUADRATURE_UNCONVERGED = 12,
  QDMOL_IO = 13,
  QDMOL_INTERNAL = 99
} qdmol_status;

typedef struct qdmol_config qdmol_config;
typedef struct qdmol_result qdmol_result;

QDMOL_API const char* qdmol_version(void);
QDMOL_API const char* qdmol_status_name(qdmol_status status);
/* 0 for QDMOL_OK, 2 for input errors, 3 for numerical failures. */
QDMOL_API int qdmol_exit_code(qdmol_status status);

QDMOL_API const char* qdmol_last_error(void);
QDMOL_API const char* qdmol_last_error_json(void);

/* Configuration ----------------------------------------------------------- */

QDMOL_API qdmol_status qdmol_config_parse(const char* json_text, qdmol_config** out);
QDMOL_API qdmol_status qdmol_config_load(const char* path, qdmol_config** out);
/* Replaces one value at a dotted path; `json_value` is a JSON literal. */
QDMOL_API qdmol_status qdmol_config_set(qdmol_config* cfg, const char* path, const char* json_value);
QDMOL_API qdmol_status qdmol_config_set_output(qdmol_config* cfg, const char* directory);
/* Resolved document with all defaults filled in. */
QDMOL_API qdmol_status qdmol_config_to_json(const qdmol_config* cfg, const char** out);
QDMOL_API void qdmol_config_free(qdmol_config* cfg);

/* Runs ------------------------------------------------------------------- */

/* Runs the scenario, writing artifacts into the configured output directory.
 * On failure error.json is written there as well. */
QDMOL_API qdmol_status qdmol_run(const qdmol_config* cfg, qdmol_result** out);
QDMOL_API qdmol_status qdmol_result_summary(const qdmol_result* result, const char** out);
QDMOL_API void qdmol_result_free(qdmol_result* result);

/* `values_json` is a JSON array; one run per element. */
QDMOL_API qdmol_status qdmol_sweep(const qdmol_config* cfg, const char* path, const char* values_json,
                                   qdmol_result** out);

/* Runs seeds s, s+1, s+2 without writing artifacts; `invariant` is set to 1
 * when every numeric result agrees to `tolerance` relative. The report is
 * available through qdmol_result_summary. */
QDMOL_API qdmol_status qdmol_check_seed_invariance(const qdmol_config* cfg, double tolerance,
                                                   int* invariant, qdmol_result** out);

/* Scalar physics -------------------------------------------------------- */

/* Box potential of the configured control molecule at (x, y, z), meV. */
QDMOL_API qdmol_status qdmol_potential_at(const qdmol_config* cfg, double x, double y, double z,
                                          double* out);
/* Rotating-wave pi time pi hbar / (z01 E), ps. */
QDMOL_API qdmol_status qdmol_pi_pulse_seed(double z01_nm, double field_mv_per_nm, double* out);
/* exp(-pi s / g). */
QDMOL_API qdmol_status qdmol_plate_screening_factor(double lateral_nm, double gap_nm, double* out);
/* 1 + n(E, T). */
QDMOL_API qdmol_status qdmol_thermal_factor(double energy_mev, double temperature_k, double* out);

#ifdef __cplusplus
}
#endif

#endif
