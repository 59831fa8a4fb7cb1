#ifndef WAVEMAP_H
#define WAVEMAP_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define WM_API __attribute__((visibility("default")))
#else
#define WM_API
#endif

/* Return codes: 0 on success, otherwise one of the WM_* error classes below. */
enum {
    WM_OK = 0,
    WM_INTERNAL = 1,
    WM_CONFIG_ERROR = 2,
    WM_COMPATIBILITY_ERROR = 3,
    WM_DISTANCE_EXCEEDED = 4,
    WM_CAUSALITY_VIOLATED = 5,
    WM_OUTSIDE_DOMAIN = 6,
    WM_DELTA_TOO_LARGE = 7,
    WM_REGION_MISMATCH = 8,
    WM_DATA_COVERAGE = 9,
    WM_OFF_LATTICE = 10,
    WM_TEST_FUNCTION_SUPPORT = 11,
    WM_LATTICE_MISMATCH = 12,
    WM_MISSING_PROVENANCE = 13,
    WM_BUDGET_INFEASIBLE = 14,
    WM_SMALLNESS_VIOLATED = 15,
    WM_NO_CONVERGENCE = 16,
    WM_DEGENERATE_HEIGHT = 17,
    WM_OVERLAP_MISMATCH = 18,
    WM_STALL_DETECTED = 19,
    WM_TAIL_NOT_SMALL = 20,
    WM_TAIL_MASS = 21,
    WM_IO_ERROR = 22
};

typedef struct wm_context wm_context;

WM_API wm_context* wm_create(void);
WM_API void wm_destroy(wm_context* ctx);

/* Parse and validate a JSON run configuration (file or in-memory text). */
WM_API int wm_load_config(wm_context* ctx, const char* path);
WM_API int wm_load_config_json(wm_context* ctx, const char* text);

/* Overrides applied on top of the loaded configuration. */
WM_API int wm_set_threads(wm_context* ctx, int threads);
WM_API int wm_set_seed(wm_context* ctx, unsigned long long seed);

/* command: "solve", "verify-estimates", "scatter" or "converge" */
WM_API int wm_run(wm_context* ctx, const char* command, const char* out_dir);

/* Message of the last failure on this context ("" if none); owned by the context. */
WM_API const char* wm_last_error(const wm_context* ctx);
WM_API const char* wm_status_name(int code);
WM_API const char* wm_version(void);

/* trace, debug, info, warn, error, off */
WM_API int wm_set_log_level(const char* level);

#ifdef __cplusplus
}
#endif

#endif
