/* C interface of the ymsym verification toolkit. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by fallible entry points.
 */
typedef enum YmsymStatus {
  YMSYM_STATUS_OK = 0,
  YMSYM_STATUS_FAIL = 1,
  YMSYM_STATUS_INVALID_ARGUMENT = 2,
  YMSYM_STATUS_SINGULAR = 3,
  YMSYM_STATUS_NO_CONVERGENCE = 4,
  YMSYM_STATUS_INTERNAL = 5,
} YmsymStatus;

/**
 * Opaque gauge-field handle.
 */
typedef struct YmsymField YmsymField;

/**
 * Opaque self-dual morphism handle.
 */
typedef struct YmsymMorphism YmsymMorphism;

/**
 * Opaque verification report handle.
 */
typedef struct YmsymReport YmsymReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread; valid until the next
 * failing call. Never free this pointer.
 */
const char *ymsym_last_error(void);

/**
 * Crate version as a static string.
 */
const char *ymsym_version(void);

/**
 * Build a catalog gauge field from its JSON spec, for example
 * `{"name":"instanton","rho":[2.0,0.0],"center":3.0}`. Returns null on
 * error; see `ymsym_last_error`.
 *
 * # Safety
 * `spec_json` must be null or point at a NUL-terminated string.
 */
struct YmsymField *ymsym_field_create(const char *spec_json);

/**
 * # Safety
 * `field` must come from `ymsym_field_create` and not be freed twice.
 */
void ymsym_field_free(struct YmsymField *field);

/**
 * Build a catalog morphism from its JSON spec, for example
 * `{"name":"affine_random","seed":42,"spread":0.3}`.
 *
 * # Safety
 * `spec_json` must be null or point at a NUL-terminated string.
 */
struct YmsymMorphism *ymsym_morphism_create(const char *spec_json);

/**
 * # Safety
 * `morphism` must come from `ymsym_morphism_create` and not be freed twice.
 */
void ymsym_morphism_free(struct YmsymMorphism *morphism);

/**
 * Norm of the self-dual curvature block of the field at x.
 *
 * # Safety
 * `field` must be a live handle; `x` must point at eight doubles; `out` at
 * one double.
 */
enum YmsymStatus ymsym_field_asd_residual(const struct YmsymField *field,
                                          const double *x,
                                          double *out);

/**
 * Norm of the self-dual curvature block of the pullback connection at x.
 *
 * # Safety
 * As `ymsym_field_asd_residual`, plus a live morphism handle.
 */
enum YmsymStatus ymsym_pullback_asd_residual(const struct YmsymMorphism *morphism,
                                             const struct YmsymField *field,
                                             const double *x,
                                             double *out);

/**
 * Run the configured verification suites; the full `RunConfig` JSON schema
 * of the CLI applies. Returns null on configuration errors.
 *
 * # Safety
 * `config_json` must be null or point at a NUL-terminated string.
 */
struct YmsymReport *ymsym_run(const char *config_json);

/**
 * 1 when every record passed, 0 otherwise, -1 on a null handle.
 *
 * # Safety
 * `report` must be a live handle from `ymsym_run`.
 */
int32_t ymsym_report_overall_pass(const struct YmsymReport *report);

/**
 * Number of check records in the report; -1 on a null handle.
 *
 * # Safety
 * `report` must be a live handle from `ymsym_run`.
 */
int64_t ymsym_report_record_count(const struct YmsymReport *report);

/**
 * Serialized report; release with `ymsym_string_free`.
 *
 * # Safety
 * `report` must be a live handle from `ymsym_run`.
 */
char *ymsym_report_json(const struct YmsymReport *report);

/**
 * # Safety
 * `report` must come from `ymsym_run` and not be freed twice.
 */
void ymsym_report_free(struct YmsymReport *report);

/**
 * # Safety
 * `s` must come from `ymsym_report_json` and not be freed twice.
 */
void ymsym_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
