/*
 * sigpath: truncated path signatures of piecewise-linear paths, path
 * imputation of irregular time series and a benchmark experiment runner.
 *
 * All functions return sigpath_status; on failure sigpath_last_error()
 * yields a thread-local diagnostic. Objects are opaque handles released
 * with the matching *_free function. Strings returned through char** out
 * parameters are released with sigpath_string_free.
 */

#ifndef SIGPATH_SIGPATH_H
#define SIGPATH_SIGPATH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SIGPATH_API __declspec(dllexport)
#else
#define SIGPATH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sigpath_status {
  SIGPATH_OK = 0,
  SIGPATH_ERR_INVALID_ARGUMENT = 1,
  SIGPATH_ERR_PARSE = 2,
  SIGPATH_ERR_NUMERIC = 3,
  SIGPATH_ERR_IO = 4,
  SIGPATH_ERR_INTERNAL = 5
} sigpath_status;

typedef struct sigpath_dataset sigpath_dataset;
typedef struct sigpath_path sigpath_path;
typedef struct sigpath_signature sigpath_signature;

SIGPATH_API const char* sigpath_version(void);

/* thread-local message describing the most recent failure */
SIGPATH_API const char* sigpath_last_error(void);

SIGPATH_API void sigpath_string_free(char* s);

/* ---- datasets ------------------------------------------------------- */

/* Long-format series CSV (header id,time,channel,value) plus a labels CSV
 * (header id,label). labels_csv may be NULL; labels then default to 0. */
SIGPATH_API sigpath_status sigpath_dataset_parse(const char* series_csv, const char* labels_csv,
                                                 sigpath_dataset** out);

/* Synthetic dataset from a generator spec (JSON). */
SIGPATH_API sigpath_status sigpath_dataset_synth(const char* spec_json, uint64_t seed,
                                                 sigpath_dataset** out);

SIGPATH_API void sigpath_dataset_free(sigpath_dataset* ds);

SIGPATH_API size_t sigpath_dataset_size(const sigpath_dataset* ds);
SIGPATH_API size_t sigpath_dataset_channels(const sigpath_dataset* ds);

SIGPATH_API sigpath_status sigpath_dataset_instance_id(const sigpath_dataset* ds, size_t index,
                                                       char** out);

/* split: -1 all instances, 0 the train split, 1 the test split */
SIGPATH_API sigpath_status sigpath_dataset_serialize(const sigpath_dataset* ds, int split,
                                                     char** series_csv, char** labels_csv);

/* Imputes one instance on the grid of its own observed timestamps.
 * strategy is one of: linear, forward-fill, zero, indicator, causal,
 * gp-mean, gp-mc, gp-pom. GP strategies fit the posterior on the fly; seed
 * drives the single draw taken by gp-mc. */
SIGPATH_API sigpath_status sigpath_dataset_impute(const sigpath_dataset* ds, size_t index,
                                                  const char* strategy, uint64_t seed,
                                                  sigpath_path** out);

/* ---- paths and signatures ------------------------------------------- */

/* params: knots values, nondecreasing; values: knots x dim, row-major */
SIGPATH_API sigpath_status sigpath_path_new(const double* params, const double* values,
                                            size_t knots, size_t dim, sigpath_path** out);
SIGPATH_API void sigpath_path_free(sigpath_path* p);
SIGPATH_API size_t sigpath_path_knots(const sigpath_path* p);
SIGPATH_API size_t sigpath_path_dim(const sigpath_path* p);

SIGPATH_API sigpath_status sigpath_signature_compute(const sigpath_path* p, int depth,
                                                     sigpath_signature** out);
SIGPATH_API void sigpath_signature_free(sigpath_signature* s);
SIGPATH_API size_t sigpath_signature_dim(const sigpath_signature* s);
SIGPATH_API int sigpath_signature_depth(const sigpath_signature* s);

/* level in 1..depth; coefficients are row-major over multi-indices */
SIGPATH_API size_t sigpath_signature_level_size(const sigpath_signature* s, int level);
SIGPATH_API sigpath_status sigpath_signature_level(const sigpath_signature* s, int level,
                                                   double* out, size_t out_len);

/* signed area of channels (i, j) against the endpoint chord */
SIGPATH_API sigpath_status sigpath_levy_area(const sigpath_path* p, size_t channel_i,
                                             size_t channel_j, double* out);

/* ---- experiments ----------------------------------------------------- */

/* Runs the full experiment described by the JSON config; writes report
 * files to the configured output directory and returns the report JSON. */
SIGPATH_API sigpath_status sigpath_run_experiment(const char* config_json,
                                                  char** report_json_out);

#ifdef __cplusplus
}
#endif

#endif /* SIGPATH_SIGPATH_H */
