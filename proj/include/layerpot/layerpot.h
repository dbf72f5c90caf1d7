/* C interface to the layerpot library. All handles are opaque; every
 * function returning layerpot_status leaves a message for
 * layerpot_last_error() on failure. Messages are per thread. */
#ifndef LAYERPOT_LAYERPOT_H
#define LAYERPOT_LAYERPOT_H

#include <stddef.h>

#if defined(_WIN32)
#define LAYERPOT_API __declspec(dllexport)
#else
#define LAYERPOT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum layerpot_status {
  LAYERPOT_OK = 0,
  LAYERPOT_E_DOMAIN = 1,
  LAYERPOT_E_DIMENSION = 2,
  LAYERPOT_E_SINGULARITY = 3,
  LAYERPOT_E_PLACEMENT = 4,
  LAYERPOT_E_RANGE = 5,
  LAYERPOT_E_EXPONENT = 6,
  LAYERPOT_E_INTEGRABILITY = 7,
  LAYERPOT_E_CATALOG = 8,
  LAYERPOT_E_PARAMETER = 9,
  LAYERPOT_E_CAPABILITY = 10,
  LAYERPOT_E_RESOLUTION = 11,
  LAYERPOT_E_BUDGET = 12,
  LAYERPOT_E_CONFIG = 13,
  LAYERPOT_E_INVALID_ARGUMENT = 14, /* null handle or pointer */
  LAYERPOT_E_IO = 15,
  LAYERPOT_E_INTERNAL = 16
} layerpot_status;

typedef enum layerpot_location {
  LAYERPOT_INTERIOR = 0,
  LAYERPOT_BOUNDARY = 1,
  LAYERPOT_EXTERIOR = 2
} layerpot_location;

typedef struct layerpot_domain layerpot_domain;
typedef struct layerpot_field layerpot_field;
typedef struct layerpot_suite layerpot_suite;
typedef struct layerpot_report layerpot_report;

LAYERPOT_API const char* layerpot_version(void);
LAYERPOT_API const char* layerpot_status_name(layerpot_status status);
/* Message of the last failure on this thread; "" if none. */
LAYERPOT_API const char* layerpot_last_error(void);

/* Domains */
LAYERPOT_API layerpot_status layerpot_domain_ball(int dim, const double* center, double radius,
                                                  layerpot_domain** out);
/* r(theta) = c[0] + sum_k c[2k-1] cos k theta + c[2k] sin k theta */
LAYERPOT_API layerpot_status layerpot_domain_star(const double center[2], const double* coefficients,
                                                  size_t count, layerpot_domain** out);
LAYERPOT_API void layerpot_domain_free(layerpot_domain* domain);
LAYERPOT_API int layerpot_domain_dim(const layerpot_domain* domain);
LAYERPOT_API layerpot_status layerpot_domain_classify(const layerpot_domain* domain, const double* y,
                                                      layerpot_location* out);

/* Fields, e.g. "distance(0,0)" */
LAYERPOT_API layerpot_status layerpot_field_catalog(const char* text, int dim, layerpot_field** out);
LAYERPOT_API void layerpot_field_free(layerpot_field* field);
LAYERPOT_API layerpot_status layerpot_field_value(const layerpot_field* field, const double* x, double* out);
/* out receives dim components */
LAYERPOT_API layerpot_status layerpot_field_gradient(const layerpot_field* field, const double* x, double* out);

/* Double layer potential of the field's trace at y. */
LAYERPOT_API layerpot_status layerpot_double_layer(const layerpot_field* moment, const layerpot_domain* domain,
                                                   const double* y, int order, double* value);
/* Gradient volume integral  int <grad E(x-y), grad f(x)> dx,  y off the boundary. */
LAYERPOT_API layerpot_status layerpot_gradient_volume_integral(const layerpot_field* field,
                                                               const layerpot_domain* domain, const double* y,
                                                               int order, double* value);

/* Suites (config text as documented in the README) */
LAYERPOT_API layerpot_status layerpot_suite_parse(const char* text, const char* origin, layerpot_suite** out);
LAYERPOT_API layerpot_status layerpot_suite_load(const char* path, layerpot_suite** out);
LAYERPOT_API void layerpot_suite_free(layerpot_suite* suite);
LAYERPOT_API layerpot_status layerpot_suite_set(layerpot_suite* suite, const char* key, const char* value);
/* *value is NULL when the key is unset; the string lives as long as the suite
 * or until the key is set again. */
LAYERPOT_API layerpot_status layerpot_suite_get(const layerpot_suite* suite, const char* key, const char** value);
/* command: "verify", "converge", "table" or "bound" */
LAYERPOT_API layerpot_status layerpot_suite_run(const layerpot_suite* suite, const char* command,
                                                layerpot_report** out);

LAYERPOT_API void layerpot_report_free(layerpot_report* report);
LAYERPOT_API size_t layerpot_report_row_count(const layerpot_report* report);
LAYERPOT_API int layerpot_report_all_pass(const layerpot_report* report);
/* format: "csv", "jsonl", or NULL for the suite's output.format. The text is
 * owned by the report and valid until the next render or free. */
LAYERPOT_API layerpot_status layerpot_report_render(layerpot_report* report, const char* format, const char** text);
/* One line per failing row; owned by the report. */
LAYERPOT_API const char* layerpot_report_failures(const layerpot_report* report);

#ifdef __cplusplus
}
#endif

#endif /* LAYERPOT_LAYERPOT_H */
