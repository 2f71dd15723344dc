#ifndef YM_YM_H
#define YM_YM_H

/* C interface to the Wilson-loop toolkit. All handles are opaque; every call returns a
 * ym_status and reports details through ym_last_error() (thread-local, valid until the next
 * call on the same thread). Strings returned through char** must be released with
 * ym_free_string. */

#include <stddef.h>

#if defined(YM_BUILDING_LIBRARY)
#define YM_API __attribute__((visibility("default")))
#else
#define YM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    YM_OK = 0,
    YM_ERR_ARGUMENT = 1, /* null pointer or out-of-range argument */
    YM_ERR_CONFIG = 2,   /* invalid configuration or descriptor */
    YM_ERR_NUMERIC = 3,  /* numerical guard tripped (strict mode) */
    YM_ERR_INTERNAL = 4
} ym_status;

typedef struct ym_basis ym_basis;
typedef struct ym_surface ym_surface;

YM_API const char* ym_version(void);
YM_API const char* ym_last_error(void);
YM_API void ym_free_string(char* s);

/* Runs a command described by a JSON run config; *result_json receives the JSON result
 * (command, config echo, columns, rows, warnings). */
YM_API ym_status ym_run(const char* config_json, char** result_json);
/* Same, rendered as CSV with the config echo as a comment line. */
YM_API ym_status ym_run_csv(const char* config_json, char** result_csv);
/* Newline-separated list of command names. */
YM_API const char* ym_command_names(void);

/* group: "U1", "SU" or "SO". */
YM_API ym_status ym_basis_create(const char* group, int n, ym_basis** out);
YM_API void ym_basis_destroy(ym_basis* b);
YM_API ym_status ym_basis_dims(const ym_basis* b, int* matrix_dim, int* algebra_dim);
YM_API ym_status ym_area_law_limit(const ym_basis* b, double area, double* value);
YM_API ym_status ym_quark_potential(const ym_basis* b, double R, double* value);

/* descriptor: JSON surface descriptor, e.g. {"type":"rectangle","R":1,"T":1}. */
YM_API ym_status ym_surface_create(const char* descriptor_json, ym_surface** out);
YM_API void ym_surface_destroy(ym_surface* s);
YM_API ym_status ym_surface_area(const ym_surface* s, int resolution, double* area);
YM_API ym_status ym_abelian_wilson(const ym_surface* s, double kappa, int resolution, double* value);

#ifdef __cplusplus
}
#endif

#endif /* YM_YM_H */
