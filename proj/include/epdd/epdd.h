/*
 * epdd.h - C interface to the electroporation drug-delivery simulator.
 *
 * All functions return an epdd_status; on failure a message is available
 * from epdd_last_error() until the next call on the same thread. Configs are
 * opaque handles created by one of the epdd_config_* constructors and
 * released with epdd_config_free().
 */
#ifndef EPDD_H
#define EPDD_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(EPDD_BUILDING)
#    define EPDD_API __declspec(dllexport)
#  else
#    define EPDD_API __declspec(dllimport)
#  endif
#else
#  define EPDD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum epdd_status {
    EPDD_OK = 0,
    EPDD_INVALID = 1,      /* configuration failed validation */
    EPDD_RUNTIME = 2,      /* solver failure: non-convergence, instability, ... */
    EPDD_IO = 3,           /* file could not be read or written */
    EPDD_BAD_ARGUMENT = 4  /* null handle, unknown key, malformed value */
} epdd_status;

typedef struct epdd_config epdd_config;

typedef struct epdd_run_summary {
    double final_time;     /* s */
    double ecs_mass;       /* a.u. mm^2 */
    double ics_mass;       /* a.u. mm^2 */
    double boundary_loss;  /* a.u. mm^2, cumulative */
    double max_residual;   /* relative conservation residual */
    size_t steps;
    size_t clamped;
    int unstable;
    int conservation_ok;
} epdd_run_summary;

EPDD_API const char* epdd_version(void);
EPDD_API const char* epdd_last_error(void);

/* Maps a status to the process exit code used by the command-line tool. */
EPDD_API int epdd_exit_code(epdd_status status);

EPDD_API epdd_status epdd_config_default(epdd_config** out);
EPDD_API epdd_status epdd_config_load(const char* path, epdd_config** out);
EPDD_API epdd_status epdd_config_parse(const char* json_text, epdd_config** out);
EPDD_API void epdd_config_free(epdd_config* cfg);
EPDD_API epdd_status epdd_config_save(const epdd_config* cfg, const char* path);

/*
 * Full config as JSON. Writes at most @p size bytes including the
 * terminator into @p buf and stores the required size in @p needed.
 */
EPDD_API epdd_status epdd_config_to_json(const epdd_config* cfg, char* buf, size_t size, size_t* needed);

/*
 * Sets one field, addressed as "section.key" with a value in config-file
 * syntax, e.g. ("drug.permeability", "\"5e-4 mm/s\"") or ("pulses.count", "1").
 * Changing grid.nx, grid.ny or tissue.length re-derives the spacing.
 */
EPDD_API epdd_status epdd_config_set(epdd_config* cfg, const char* key, const char* json_value);

/* Runtime switches matching the command-line flags. */
EPDD_API epdd_status epdd_config_set_allow_unstable(epdd_config* cfg, int allow);
EPDD_API epdd_status epdd_config_set_literal_robin(epdd_config* cfg, int literal);
EPDD_API epdd_status epdd_config_set_snapshot_every_cycle(epdd_config* cfg, int every);
EPDD_API epdd_status epdd_config_set_tau(epdd_config* cfg, double tau_seconds);

/* Validates; on success stores the FTCS step bound (s) in @p stability_limit if non-null. */
EPDD_API epdd_status epdd_config_validate(const epdd_config* cfg, double* stability_limit);

EPDD_API double epdd_stability_limit(double dx_mm, double dy_mm, double diffusivity_mm2_s);

EPDD_API epdd_status epdd_run(const epdd_config* cfg, const char* out_dir, epdd_run_summary* summary);

/* axis: "beta", "P" or "PN". */
EPDD_API epdd_status epdd_sweep(const epdd_config* cfg, const char* axis, const double* values, size_t count,
                                const char* out_dir, unsigned threads);

/* Single-pulse comparison with the reference transfer coefficient. */
EPDD_API epdd_status epdd_compare_kalamiza(const epdd_config* cfg, const char* out_dir, double* prefactor_ratio,
                                           double* max_C_RE_gap);

/* Pointwise model functions, internal units (V/mm, S/m, 1/s). */
EPDD_API double epdd_conductivity(const epdd_config* cfg, double E);
EPDD_API double epdd_pore_fraction(const epdd_config* cfg, double E);
EPDD_API double epdd_mtc(const epdd_config* cfg, double clock, double E);
EPDD_API double epdd_mtc_kalamiza(const epdd_config* cfg, double clock);

#ifdef __cplusplus
}
#endif

#endif
