#ifndef PSEUDOHERM_H
#define PSEUDOHERM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PhStatus {
  PH_STATUS_OK = 0,
  PH_STATUS_NULL_ARGUMENT = 1,
  PH_STATUS_INVALID_ARGUMENT = 2,
  PH_STATUS_CONFIG = 3,
  PH_STATUS_NUMERICAL = 4,
  PH_STATUS_HYPOTHESIS = 5,
  PH_STATUS_IO = 6,
  PH_STATUS_PANIC = 7,
} PhStatus;

typedef enum PhModel {
  PH_MODEL_HEISENBERG = 0,
  PH_MODEL_SPHERE = 1,
} PhModel;

typedef enum PhSuite {
  PH_SUITE_TRANSFORM = 0,
  PH_SUITE_JERISON_LEE = 1,
  PH_SUITE_APPENDIX = 2,
  PH_SUITE_YAMABE = 3,
  PH_SUITE_ALL = 4,
} PhSuite;

typedef enum PhFormat {
  PH_FORMAT_JSON = 0,
  PH_FORMAT_CSV_SUMMARY = 1,
} PhFormat;

/**
 * Verification report produced by [`ph_run_suite`].
 */
typedef struct PhReport PhReport;

/**
 * Pseudohermitian state at one chart point.
 */
typedef struct PhState PhState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *ph_version(void);

/**
 * Message of the last failure on this thread, or NULL. Valid until the next
 * failing call on the same thread.
 */
const char *ph_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a pointer returned by this library and not yet freed.
 */
void ph_string_free(char *s);

/**
 * Builds the state of `factor * model form` at a chart point.
 *
 * `factor_json` is a JSON factor descriptor, or NULL for the constant 1.
 * `point` holds `2m + 1` chart coordinates `(x1, y1, ..., t)`.
 *
 * # Safety
 * `point` must reference `point_len` readable doubles, `factor_json` must be
 * NULL or a NUL-terminated string, and `out` must be writable.
 */
enum PhStatus ph_state_new(enum PhModel model,
                           size_t m,
                           const char *factor_json,
                           const double *point,
                           size_t point_len,
                           size_t jet_order,
                           struct PhState **out);

/**
 * # Safety
 * `state` must be NULL or a handle from [`ph_state_new`] not yet freed.
 */
void ph_state_free(struct PhState *state);

/**
 * CR dimension `m` of the state.
 *
 * # Safety
 * `state` must be a live handle.
 */
enum PhStatus ph_state_cr_dimension(const struct PhState *state, size_t *out);

/**
 * Webster scalar curvature at the point; needs jet order 3.
 *
 * # Safety
 * `state` must be a live handle and `out` writable.
 */
enum PhStatus ph_state_scalar_curvature(const struct PhState *state, double *out);

/**
 * `sum |A_ab|^2` at the point.
 *
 * # Safety
 * `state` must be a live handle and `out` writable.
 */
enum PhStatus ph_state_torsion_norm_sqr(const struct PhState *state, double *out);

/**
 * Ricci components `R_{a b-bar}` row-major into `re` and `im`, each of
 * length at least `m * m`.
 *
 * # Safety
 * `state` must be a live handle; `re` and `im` must reference `len`
 * writable doubles.
 */
enum PhStatus ph_state_ricci(const struct PhState *state, double *re, double *im, size_t len);

/**
 * Yamabe quotient of `factor * theta_c` on the sphere with the default
 * quadrature rule for `m`.
 *
 * # Safety
 * `factor_json` must be NULL or a NUL-terminated string; `out` writable.
 */
enum PhStatus ph_yamabe_quotient(size_t m, const char *factor_json, double *out);

/**
 * Runs a check suite. `config_toml` is a TOML run configuration, or NULL
 * for the defaults. A completed run returns `PH_STATUS_OK` whatever the
 * verdict; query it with [`ph_report_passed`].
 *
 * # Safety
 * `config_toml` must be NULL or a NUL-terminated string; `out` writable.
 */
enum PhStatus ph_run_suite(const char *config_toml, enum PhSuite suite, struct PhReport **out);

/**
 * # Safety
 * `report` must be NULL or a handle from [`ph_run_suite`] not yet freed.
 */
void ph_report_free(struct PhReport *report);

/**
 * Writes 1 when every non-informational check passed, 0 otherwise.
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum PhStatus ph_report_passed(const struct PhReport *report, int32_t *out);

/**
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum PhStatus ph_report_check_count(const struct PhReport *report, size_t *out);

/**
 * Serializes the report; free the result with [`ph_string_free`].
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum PhStatus ph_report_render(const struct PhReport *report, enum PhFormat format, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PSEUDOHERM_H */
