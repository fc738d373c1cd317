/* C interface to the expsum library. All strings returned through char** are
 * heap allocated and must be released with expsum_free_string. */
#ifndef EXPSUM_H
#define EXPSUM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EXPSUM_API __declspec(dllexport)
#else
#define EXPSUM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum expsum_status {
  EXPSUM_OK = 0,
  EXPSUM_INVALID_ARGUMENT = 1,
  EXPSUM_SYNTAX_ERROR,
  EXPSUM_DOMAIN_ERROR,
  EXPSUM_RELATION_UNDETECTABLE,
  EXPSUM_LATTICE_MISMATCH,
  EXPSUM_NOT_A_VERTEX,
  EXPSUM_CONE_VIOLATION,
  EXPSUM_DEGENERATE_INPUT,
  EXPSUM_DIMENSION_UNSUPPORTED,
  EXPSUM_NOT_DEVELOPED,
  EXPSUM_MISSING_COEFFICIENTS,
  EXPSUM_NO_CONVERGENCE,
  EXPSUM_BOUNDARY_ZERO,
  EXPSUM_ORBIT_DEGENERATE,
  EXPSUM_TRACING_STALLED,
  EXPSUM_DEGENERATE_SEGMENT,
  EXPSUM_ISOLATION_UNDECIDED,
  EXPSUM_IO_ERROR,
  EXPSUM_SCHEMA_ERROR,
  EXPSUM_INTERNAL
} expsum_status;

typedef struct expsum_lattice expsum_lattice;
typedef struct expsum_problem expsum_problem;

/* "NotDeveloped", "SchemaError", ... */
EXPSUM_API const char* expsum_status_name(expsum_status status);

/* Message of the last failure on the calling thread, "module.Code: detail". */
EXPSUM_API const char* expsum_last_error(void);

EXPSUM_API const char* expsum_version(void);
EXPSUM_API void expsum_free_string(char* s);

/* 0 restores the default (EXPSUM_THREADS or hardware concurrency). */
EXPSUM_API expsum_status expsum_set_threads(size_t threads);

/* Evaluates n coordinate expressions such as "1+sqrt(2)" into out[0..n). */
EXPSUM_API expsum_status expsum_parse_frequency(const char* const* exprs, size_t n, double* out);

/* exprs holds count frequencies of n coordinates each, row-major. */
EXPSUM_API expsum_status expsum_lattice_create(const char* const* exprs, size_t count, size_t n, int64_t K, double eps,
                                               expsum_lattice** out);
EXPSUM_API size_t expsum_lattice_rank(const expsum_lattice* lattice);
/* Integer coordinates of input frequency `index`; out must hold rank entries. */
EXPSUM_API expsum_status expsum_lattice_coords(const expsum_lattice* lattice, size_t index, int64_t* out);
EXPSUM_API expsum_status expsum_lattice_describe(const expsum_lattice* lattice, char** out);
EXPSUM_API void expsum_lattice_free(expsum_lattice* lattice);

/* Experiment configuration in the JSON run format. */
EXPSUM_API expsum_status expsum_problem_from_json(const char* json, expsum_problem** out);
/* Fields: command, seed, threads, tol_residual, tol_compare, out_dir, k_file. */
EXPSUM_API expsum_status expsum_problem_override(expsum_problem* problem, const char* field, const char* value);
EXPSUM_API void expsum_problem_free(expsum_problem* problem);

/* Runs the configured command and writes artifacts to out_dir. exit_code is 0
 * on success and 2 when a verification comparison fails; summary (optional)
 * receives a JSON description of the run. */
EXPSUM_API expsum_status expsum_run(const expsum_problem* problem, int* exit_code, char** summary);

#ifdef __cplusplus
}
#endif

#endif
