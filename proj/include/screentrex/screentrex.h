/* C interface to the screentrex library.
 *
 * All objects are opaque handles created by a *_new / *_load / *_run call and
 * released with the matching *_free. Every fallible call returns a
 * strex_status; on failure strex_last_error() holds a message for the calling
 * thread until the next failing call on that thread.
 */
#ifndef SCREENTREX_H
#define SCREENTREX_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SCREENTREX_BUILDING)
#    define STREX_API __declspec(dllexport)
#  else
#    define STREX_API __declspec(dllimport)
#  endif
#else
#  define STREX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum strex_status {
  STREX_OK = 0,
  STREX_E_INVALID_ARGUMENT = 1,
  STREX_E_IO = 2,
  STREX_E_PARSE = 3,
  STREX_E_DIMENSION = 4,
  STREX_E_ZERO_VARIANCE = 5,
  STREX_E_NOT_STANDARDIZED = 6,
  STREX_E_SINGULAR = 7,
  STREX_E_EMPTY_POOL = 8,
  STREX_E_INTERNAL = 9
} strex_status;

typedef enum strex_branch {
  STREX_BRANCH_CONFIDENCE = 0,
  STREX_BRANCH_ORDINARY = 1,
  STREX_BRANCH_FALLBACK = 2
} strex_branch;

typedef struct strex_dataset strex_dataset;
typedef struct strex_config strex_config;
typedef struct strex_decision strex_decision;
typedef struct strex_batch strex_batch;
typedef struct strex_bench strex_bench;

STREX_API const char* strex_version(void);
STREX_API const char* strex_status_string(strex_status status);
STREX_API const char* strex_last_error(void);

/* Datasets */
STREX_API strex_status strex_dataset_load_csv(const char* x_path, const char* y_path, int header,
                                              strex_dataset** out);
/* x is row-major n x p. labels may be NULL (V1..Vp). */
STREX_API strex_status strex_dataset_from_arrays(const double* x, const double* y, size_t n,
                                                 size_t p, const char* const* labels,
                                                 strex_dataset** out);
STREX_API size_t strex_dataset_rows(const strex_dataset* d);
STREX_API size_t strex_dataset_cols(const strex_dataset* d);
STREX_API void strex_dataset_free(strex_dataset* d);

/* Configuration: built-in defaults, then an optional flat JSON file, then setters. */
STREX_API strex_status strex_config_new(strex_config** out);
STREX_API strex_status strex_config_load_json(strex_config* cfg, const char* path);
STREX_API strex_status strex_config_set_alpha(strex_config* cfg, double alpha);
STREX_API strex_status strex_config_set_window(strex_config* cfg, double alpha_l, double alpha_u);
STREX_API strex_status strex_config_set_alpha_l(strex_config* cfg, double alpha_l);
STREX_API strex_status strex_config_set_alpha_u(strex_config* cfg, double alpha_u);
STREX_API strex_status strex_config_set_k(strex_config* cfg, size_t k);
STREX_API strex_status strex_config_set_seed(strex_config* cfg, uint64_t seed);
STREX_API strex_status strex_config_set_resamples(strex_config* cfg, size_t resamples);
STREX_API strex_status strex_config_set_threads(strex_config* cfg, size_t threads);
STREX_API strex_status strex_config_set_header(strex_config* cfg, int header);
STREX_API strex_status strex_config_validate(const strex_config* cfg);
STREX_API int strex_config_header(const strex_config* cfg);
STREX_API void strex_config_free(strex_config* cfg);

/* Single phenotype */
STREX_API strex_status strex_screen(const strex_dataset* d, const strex_config* cfg,
                                    const char* phenotype_id, strex_decision** out);
STREX_API strex_branch strex_decision_branch(const strex_decision* r);
STREX_API double strex_decision_alpha_hat(const strex_decision* r);
STREX_API double strex_decision_alpha_hat_c(const strex_decision* r);
STREX_API double strex_decision_gamma(const strex_decision* r);
STREX_API double strex_decision_wall_time(const strex_decision* r);
STREX_API int strex_decision_fallback_used(const strex_decision* r);
STREX_API size_t strex_decision_num_selected(const strex_decision* r);
/* Copies up to capacity 0-based column indices; returns the total count. */
STREX_API size_t strex_decision_selected(const strex_decision* r, size_t* indices, size_t capacity);
STREX_API strex_status strex_decision_write(const strex_decision* r, const strex_config* cfg,
                                            const char* csv_path, const char* json_path);
STREX_API void strex_decision_free(strex_decision* r);

/* Branch choice from the two estimates and the acceptance window. */
STREX_API strex_branch strex_decide(double alpha_hat, double alpha_hat_c, double alpha_l,
                                    double alpha_u);

/* Batch over a manifest CSV (x_path,y_path,phenotype_id). */
STREX_API strex_status strex_batch_run(const char* manifest_path, const strex_config* cfg,
                                       strex_batch** out);
STREX_API size_t strex_batch_rows(const strex_batch* b);
STREX_API size_t strex_batch_failures(const strex_batch* b);
STREX_API size_t strex_batch_branch_count(const strex_batch* b, strex_branch branch);
STREX_API strex_status strex_batch_write(const strex_batch* b, const strex_config* cfg,
                                         const char* csv_path, const char* json_path);
STREX_API void strex_batch_free(strex_batch* b);

/* Monte Carlo harness. spec is inline JSON or a path to a JSON file; methods
 * is a comma list of ordinary,confidence,fallback; snr_grid is a comma list
 * of SNR values or NULL/empty to use the spec's snr. */
STREX_API strex_status strex_bench_run(const char* spec, size_t reps, const char* methods,
                                       const char* snr_grid, const strex_config* cfg,
                                       strex_bench** out);
STREX_API size_t strex_bench_rows(const strex_bench* b);
STREX_API size_t strex_bench_failures(const strex_bench* b);
/* Summary for the i-th (snr, method) block. Returns STREX_E_INVALID_ARGUMENT when out of range. */
STREX_API strex_status strex_bench_summary(const strex_bench* b, size_t i, double* snr,
                                           double* mean_fdp, double* se_fdp,
                                           double* mean_alpha_hat, double* mean_tpp);
STREX_API size_t strex_bench_num_summaries(const strex_bench* b);
STREX_API strex_status strex_bench_write(const strex_bench* b, const char* csv_path,
                                         const char* json_path);
STREX_API void strex_bench_free(strex_bench* b);

#ifdef __cplusplus
}
#endif

#endif /* SCREENTREX_H */
