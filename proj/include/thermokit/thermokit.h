/* thermokit: pressure, Lyapunov spectra and symbolic models of countable-branch interval maps. */
#ifndef THERMOKIT_THERMOKIT_H
#define THERMOKIT_THERMOKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TK_API __declspec(dllexport)
#else
#define TK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define TK_SCHEMA_VERSION 1

/* Codes 2..4 double as CLI exit codes. */
typedef enum tk_status {
    TK_OK = 0,
    TK_INVALID_ARGUMENT = 1,
    TK_CONFIG = 2,
    TK_NONCONVERGENCE = 3,
    TK_BUDGET = 4,
    TK_NUMERIC = 5,
    TK_INTERNAL = 6
} tk_status;

typedef enum tk_route { TK_ROUTE_AUTO = 0, TK_ROUTE_CYLINDER = 1, TK_ROUTE_INDUCED = 2 } tk_route;

typedef enum tk_method {
    TK_METHOD_CYLINDER = 0,
    TK_METHOD_INDUCED = 1,
    TK_METHOD_CLOSED_FORM = 2,
    TK_METHOD_DEGENERATE = 3
} tk_method;

typedef enum tk_rule_kind {
    TK_RULE_RENEWAL = 0,
    TK_RULE_N_RENEWAL = 1,
    TK_RULE_INFINITE_RENEWAL = 2,
    TK_RULE_RENEWAL_BLOCK = 3,
    TK_RULE_CYCLE = 4
} tk_rule_kind;

typedef struct tk_map tk_map;
typedef struct tk_engine tk_engine;
typedef struct tk_curve tk_curve;
typedef struct tk_spectrum tk_spectrum;

typedef struct tk_engine_options {
    tk_route route;
    long cylinder_N;
    long induced_N;
    long induced_J;
    double tol;
    int depth_cap;
} tk_engine_options;

typedef struct tk_pressure {
    double t;
    double value; /* +inf when infinite */
    double lower;
    double upper;
    double error;
    int infinite;
    int converged;
    long N;
    int depth;
    tk_method method;
} tk_pressure;

typedef struct tk_spectrum_point {
    double alpha;
    double L;
    double L_error;
    double t_alpha;
    double residual;
    double residual_error;
    int present;
    int pinned;
    int bound;
} tk_spectrum_point;

typedef struct tk_gurevich_row {
    long n;
    double raw;
    double estimate;
} tk_gurevich_row;

typedef struct tk_birkhoff_sample {
    double x0;
    long n;
    double lambda_hat;
    int escaped;
} tk_birkhoff_sample;

TK_API const char* tk_version(void);
/* Message of the last failed call on this thread; empty after a success. */
TK_API const char* tk_last_error(void);
/* Strings returned through char** out-parameters are released with this. */
TK_API void tk_string_free(char* s);

/* Maps. */
TK_API tk_status tk_map_from_json(const char* json, tk_map** out);
TK_API tk_status tk_map_from_file(const char* path, tk_map** out);
TK_API tk_status tk_map_truncate(const tk_map* map, long N, tk_map** out);
TK_API tk_status tk_map_describe(const tk_map* map, char** out);
TK_API tk_status tk_map_to_json(const tk_map* map, char** out);
TK_API tk_status tk_map_validate_json(const tk_map* map, int depth, char** out);
TK_API void tk_map_free(tk_map* map);

/* Pressure. */
TK_API void tk_engine_options_default(tk_engine_options* opts);
TK_API tk_status tk_engine_create(const tk_map* map, const tk_engine_options* opts, tk_engine** out);
TK_API void tk_engine_free(tk_engine* engine);
TK_API tk_status tk_engine_t_star(const tk_engine* engine, double* out);
TK_API tk_status tk_engine_dim(const tk_engine* engine, double* out);
TK_API tk_status tk_pressure_at(const tk_engine* engine, double t, tk_pressure* out);
TK_API tk_status tk_pressure_by(const tk_engine* engine, double t, tk_route route, tk_pressure* out);
/* P_N for the truncation to N branches. */
TK_API tk_status tk_pressure_truncated(const tk_map* map, double t, long N, tk_pressure* out);
TK_API tk_status tk_regime_json(const tk_engine* engine, char** out);
/* Return-map branches with n <= n_cap, j <= j_cap as CSV; parabolic maps only. */
TK_API tk_status tk_induced_csv(const tk_engine* engine, long n_cap, long j_cap, char** out);

/* Curves; a NULL grid selects automatic panels. */
TK_API tk_status tk_curve_build(const tk_engine* engine, const double* t_grid, size_t n, tk_curve** out);
TK_API void tk_curve_free(tk_curve* curve);
TK_API size_t tk_curve_size(const tk_curve* curve);
TK_API tk_status tk_curve_point(const tk_curve* curve, size_t i, tk_pressure* out);
TK_API tk_status tk_curve_value(const tk_curve* curve, double t, double* value, double* derivative);
/* 0 when some sampled value, interpolation nodes included, missed its tolerance. */
TK_API tk_status tk_curve_converged(const tk_curve* curve, int* out);
TK_API tk_status tk_curve_check(const tk_curve* curve, int* monotone, int* convex, int* bracketed);
TK_API tk_status tk_curve_csv(const tk_curve* curve, char** out);
/* Points plus the regime report. */
TK_API tk_status tk_curve_json(const tk_curve* curve, char** out);

/* Spectra; a NULL grid selects a geometric grid from alpha_min to 50. */
TK_API tk_status tk_spectrum_build(const tk_curve* curve, const double* alpha, size_t n, tk_spectrum** out);
TK_API void tk_spectrum_free(tk_spectrum* spectrum);
TK_API size_t tk_spectrum_size(const tk_spectrum* spectrum);
TK_API tk_status tk_spectrum_point_at(const tk_spectrum* spectrum, size_t i, tk_spectrum_point* out);
TK_API tk_status tk_spectrum_eval(const tk_spectrum* spectrum, double alpha, tk_spectrum_point* out);
TK_API tk_status tk_spectrum_csv(const tk_spectrum* spectrum, char** out);
TK_API tk_status tk_spectrum_features_json(const tk_spectrum* spectrum, char** out);
/* Inflection analysis: residual signs against second differences of L. */
TK_API tk_status tk_inflection_json(const tk_spectrum* spectrum, char** out);
TK_API tk_status tk_truncated_spectra_json(const tk_map* map, double alpha, const long* N, size_t n, char** out);

/* Symbolic models. N is ignored (pass 0) for kinds without a parameter. */
TK_API tk_status tk_rule_allowed(tk_rule_kind kind, long N, long i, long j, int* out);
TK_API tk_status tk_check_mixing(tk_rule_kind kind, long N, long cap, int* out);
/* rows must hold n_max entries. */
TK_API tk_status tk_gurevich(tk_rule_kind kind, long N, double phi, long base, long n_max, long cap,
                             tk_gurevich_row* rows, size_t* rows_out, long* period);
TK_API tk_status tk_gurevich_csv(tk_rule_kind kind, long N, double phi, long base, long n_max, long cap, char** out);
TK_API tk_status tk_shift_check_json(const tk_map* map, long N, long depth, char** out);

/* Orbits. x is a decimal literal or one of golden, 1/pi, sqrt2-1, e-2. */
TK_API tk_status tk_sample_lyapunov(const tk_map* map, long count, long n, uint64_t seed, tk_birkhoff_sample* out);
TK_API tk_status tk_orbit_csv(const tk_map* map, long count, long n, uint64_t seed, char** out);
TK_API tk_status tk_cf_json(const char* x, long n, int backward, unsigned bits, char** out);
TK_API tk_status tk_lyapunov_approximants(const char* x, long n, unsigned bits, double* a, double* b);

/* Full battery for the map's family as one JSON document. */
TK_API tk_status tk_report_json(const tk_map* map, const tk_engine_options* opts, uint64_t seed, char** out);

#ifdef __cplusplus
}
#endif

#endif
