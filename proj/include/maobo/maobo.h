/* maobo: many-objective Bayesian optimization with similarity-driven
 * objective reduction. Plain C interface over opaque handles.
 *
 * Every function returning maobo_status sets a thread-local message readable
 * through maobo_last_error() when it fails. Matrices are row-major. */
#ifndef MAOBO_MAOBO_H
#define MAOBO_MAOBO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef MAOBO_BUILDING_LIBRARY
#    define MAOBO_API __declspec(dllexport)
#  else
#    define MAOBO_API __declspec(dllimport)
#  endif
#else
#  define MAOBO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum maobo_status {
  MAOBO_OK = 0,
  MAOBO_ERR_INVALID_ARGUMENT = 1,
  MAOBO_ERR_DIMENSION = 2,
  MAOBO_ERR_NUMERICAL = 3,
  MAOBO_ERR_UNSUPPORTED = 4,
  MAOBO_ERR_CONFIG = 5,
  MAOBO_ERR_IO = 6,
  MAOBO_ERR_RUN_FAILED = 7,
  MAOBO_ERR_BUFFER_TOO_SMALL = 8,
  MAOBO_ERR_INTERNAL = 9
} maobo_status;

typedef enum maobo_kernel { MAOBO_KERNEL_SQUARED_EXPONENTIAL = 0, MAOBO_KERNEL_MATERN52 = 1 } maobo_kernel;

typedef enum maobo_mean_distance {
  MAOBO_D1_AVG_RELATIVE = 0,
  MAOBO_D1_PNORM = 1,
  MAOBO_D1_COUNT = 2,
  MAOBO_D1_FRACTION = 3
} maobo_mean_distance;

typedef enum maobo_cov_distance { MAOBO_D2_FROBENIUS = 0, MAOBO_D2_NONE = 1 } maobo_cov_distance;

/* 0 quiet, 1 warnings (default), 2 per-iteration info, 3 debug. */
MAOBO_API void maobo_set_verbosity(int level);
MAOBO_API const char* maobo_last_error(void);
MAOBO_API const char* maobo_status_string(maobo_status status);
MAOBO_API const char* maobo_version(void);

/* ---- experiments ------------------------------------------------------- */

typedef struct maobo_experiment maobo_experiment;

typedef struct maobo_run_summary {
  double hypervolume;
  size_t reductions;
  size_t front_size;
  size_t evaluations_saved;
} maobo_run_summary;

typedef struct maobo_sweep_summary {
  size_t cells;
  size_t failed;
} maobo_sweep_summary;

MAOBO_API maobo_status maobo_experiment_from_file(const char* path, maobo_experiment** out);
MAOBO_API maobo_status maobo_experiment_from_string(const char* text, maobo_experiment** out);
MAOBO_API void maobo_experiment_destroy(maobo_experiment* exp);

/* Replaces the run seed, the sweep seed list and the study seed list. */
MAOBO_API maobo_status maobo_experiment_set_seed(maobo_experiment* exp, uint64_t seed);
/* Disabled reduction: single runs never reduce, sweeps run baseline cells only. */
MAOBO_API maobo_status maobo_experiment_set_reduction(maobo_experiment* exp, int enabled);
MAOBO_API maobo_status maobo_experiment_set_output(maobo_experiment* exp, const char* dir);

/* Canonical config text. `needed` receives the size including the NUL;
 * MAOBO_ERR_BUFFER_TOO_SMALL when `cap` is smaller. `buf` may be NULL. */
MAOBO_API maobo_status maobo_experiment_serialize(const maobo_experiment* exp, char* buf, size_t cap,
                                                  size_t* needed);

/* Single run with the [run] settings; artifacts in the output directory. */
MAOBO_API maobo_status maobo_experiment_run(maobo_experiment* exp, maobo_run_summary* out);
/* Full sweep; MAOBO_ERR_RUN_FAILED when any cell failed (others still ran). */
MAOBO_API maobo_status maobo_experiment_sweep(maobo_experiment* exp, maobo_sweep_summary* out);
/* Similarity study from the [study] section; writes similarity.json and pairs.csv. */
MAOBO_API maobo_status maobo_experiment_study(maobo_experiment* exp);

/* Number of study pairs after the last maobo_experiment_study, and their
 * mean distances. `labels` may be NULL; otherwise each entry points into
 * storage owned by the handle. */
MAOBO_API size_t maobo_experiment_study_pairs(const maobo_experiment* exp);
MAOBO_API maobo_status maobo_experiment_study_pair(const maobo_experiment* exp, size_t index, const char** f,
                                                   const char** g, double* mean, double* sd);

MAOBO_API maobo_status maobo_plotdata(const char* in_dir, const char* out_dir, size_t* files_written);

/* ---- gaussian processes ------------------------------------------------ */

typedef struct maobo_gp maobo_gp;

MAOBO_API maobo_status maobo_gp_fit(const double* x, size_t n, size_t d, const double* y, maobo_kernel kernel,
                                    uint64_t seed, maobo_gp** out);
MAOBO_API maobo_status maobo_gp_create(const double* x, size_t n, size_t d, const double* y, maobo_kernel kernel,
                                       const double* lengthscales, double signal_variance,
                                       double noise_variance, maobo_gp** out);
MAOBO_API void maobo_gp_destroy(maobo_gp* gp);
MAOBO_API size_t maobo_gp_dim(const maobo_gp* gp);
MAOBO_API maobo_status maobo_gp_predict(const maobo_gp* gp, const double* grid, size_t m, double* mean,
                                        double* variance);
MAOBO_API maobo_status maobo_gp_log_marginal(const maobo_gp* gp, double* out);
/* Gradient over [log l_1..log l_d, log sf2, log sn2]; `out` holds d + 2 values. */
MAOBO_API maobo_status maobo_gp_log_marginal_grad(const maobo_gp* gp, double* out);
/* Hyperparameters on the standardized scale the model was fitted on. */
MAOBO_API maobo_status maobo_gp_hyperparameters(const maobo_gp* gp, double* lengthscales,
                                                double* signal_variance, double* noise_variance);

typedef struct maobo_similarity_options {
  double eps1;
  double eps2;
  maobo_mean_distance d1_mode;
  double p;
  double delta_tol;
  maobo_cov_distance d2_mode;
} maobo_similarity_options;

typedef struct maobo_similarity_report {
  double total;
  double s1, s2, s3;
  double d1, d2;
  double a, b;
  double rho;
} maobo_similarity_report;

MAOBO_API void maobo_similarity_options_default(maobo_similarity_options* opts);
/* Distance from f to g over `grid` (m x d). NULL options mean defaults. */
MAOBO_API maobo_status maobo_gp_distance(const maobo_gp* f, const maobo_gp* g, const double* grid, size_t m,
                                         const maobo_similarity_options* opts, maobo_similarity_report* out);

/* ---- pareto / benchmarks ---------------------------------------------- */

MAOBO_API maobo_status maobo_hypervolume(const double* points, size_t n, size_t k, const double* ref,
                                         double* out);
/* Non-dominated row indices (ascending) into `indices` (capacity n). */
MAOBO_API maobo_status maobo_pareto_front(const double* points, size_t n, size_t k, size_t* indices,
                                          size_t* count);
/* `name` like "branin" or "michalewicz2d{m=100}". */
MAOBO_API maobo_status maobo_benchmark_eval(const char* name, const double* x, size_t d, double* out);

#ifdef __cplusplus
}
#endif

#endif
