/* C API for the RDRO solver library.
 *
 * All functions return rdro_status (RDRO_OK on success); on failure
 * rdro_last_error() describes what went wrong for the calling thread.
 * Objects are opaque handles released with the matching _destroy call.
 * Pointers returned by accessors stay valid until their owning handle is
 * destroyed.
 */
#ifndef RDRO_H
#define RDRO_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rdro_status {
    RDRO_OK = 0,
    RDRO_ERR_CONFIG = 1,     /* invalid configuration / unknown name */
    RDRO_ERR_DIMENSION = 2,  /* mismatched sizes */
    RDRO_ERR_DOMAIN = 3,     /* argument outside mathematical domain */
    RDRO_ERR_NUMERIC = 4,    /* overflow/underflow/non-finite values */
    RDRO_ERR_CAPACITY = 5,   /* instance too large for exact routine */
    RDRO_ERR_BRACKET = 6,    /* bracket does not straddle the target */
    RDRO_ERR_INFEASIBLE = 7, /* infeasible instance */
    RDRO_ERR_INTERNAL = 8
} rdro_status;

typedef struct rdro_run rdro_run;       /* a parsed, validated configuration */
typedef struct rdro_result rdro_result; /* outcome of a single solve */
typedef struct rdro_sweep rdro_sweep;   /* outcome of a theta sweep */
typedef struct rdro_checks rdro_checks; /* outcome of a verify suite */

const char* rdro_version(void);
/* Message for the most recent failure on this thread; never NULL. */
const char* rdro_last_error(void);

/* ---- configuration ------------------------------------------------------ */

/* JSON text of a built-in preset ("investment73"); caller frees with
 * rdro_string_free. NULL with RDRO_ERR_CONFIG recorded when unknown. */
char* rdro_preset_config(const char* name);
/* Newline-separated preset names; caller frees. */
char* rdro_preset_names(void);
void rdro_string_free(char* text);

rdro_status rdro_run_create(const char* config_json, rdro_run** out);
void rdro_run_destroy(rdro_run* run);
/* Replaces the configured seed (e.g. from the RDRO_SEED environment). */
rdro_status rdro_run_override_seed(rdro_run* run, unsigned long long seed);
const char* rdro_run_output_directory(const rdro_run* run);
const char* rdro_run_problem(const rdro_run* run);
/* 1 when the config carries a theta_grid (sweep mode). */
int rdro_run_is_sweep(const rdro_run* run);

/* ---- solving ------------------------------------------------------------ */

rdro_status rdro_run_solve(rdro_run* run, rdro_result** out);
rdro_status rdro_run_sweep(rdro_run* run, int threads, rdro_sweep** out);

/* ---- solve result accessors --------------------------------------------- */

double rdro_result_theta(const rdro_result* result);
double rdro_result_eta(const rdro_result* result);
double rdro_result_penalized_value(const rdro_result* result);
double rdro_result_constrained_value(const rdro_result* result);
double rdro_result_runtime_ms(const rdro_result* result);
int rdro_result_iterations(const rdro_result* result);
/* 1 = converged (exit 0), 0 = stopped at the iteration cap (exit 2). */
int rdro_result_converged(const rdro_result* result);
/* Flattened decision vector. */
const double* rdro_result_x(const rdro_result* result, int* length);
/* Transport plan, row-major. */
const double* rdro_result_plan(const rdro_result* result, int* rows, int* cols);
int rdro_result_trace_length(const rdro_result* result);
rdro_status rdro_result_trace_row(const rdro_result* result, int index,
                                  int* iteration, double* objective,
                                  double* step_residual);
void rdro_result_destroy(rdro_result* result);

/* ---- sweep result accessors ---------------------------------------------- */

int rdro_sweep_count(const rdro_sweep* sweep);
/* 0 when every grid point converged, else 2. */
int rdro_sweep_exit_code(const rdro_sweep* sweep);
rdro_status rdro_sweep_row(const rdro_sweep* sweep, int index, double* theta,
                           double* eta, double* value_penalized,
                           double* value_constrained, int* iterations,
                           double* runtime_ms);
void rdro_sweep_destroy(rdro_sweep* sweep);

/* ---- verify suites -------------------------------------------------------- */

/* Newline-separated suite names; caller frees. */
char* rdro_verify_suites(void);
rdro_status rdro_verify_run(const char* suite, rdro_checks** out);
int rdro_checks_count(const rdro_checks* checks);
rdro_status rdro_checks_get(const rdro_checks* checks, int index,
                            const char** name, int* passed, double* measured,
                            double* threshold);
void rdro_checks_destroy(rdro_checks* checks);

#ifdef __cplusplus
}
#endif

#endif /* RDRO_H */
