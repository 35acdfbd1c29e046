/*
 * C interface to the phaseest library: squeezed-vacuum homodyne phase
 * estimation (Fisher bounds, grid posteriors, two-step adaptive runs and
 * seeded Monte Carlo experiments).
 *
 * Every fallible call returns a phe_status. On failure the message is
 * available from phe_last_error() on the calling thread until the next call
 * into the library from that thread. Objects returned through a handle
 * pointer are owned by the caller and released with the matching _free.
 */
#ifndef PHASEEST_H
#define PHASEEST_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define PHASEEST_API __declspec(dllexport)
#else
#  define PHASEEST_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum phe_status {
  PHE_OK = 0,
  PHE_ERR_DOMAIN = 1,           /* argument outside the physical/statistical domain */
  PHE_ERR_NON_IDENTIFIABLE = 2, /* zero Fisher information at the requested point */
  PHE_ERR_INVALID_ARGUMENT = 3, /* null pointer, unknown enum, short buffer */
  PHE_ERR_IO = 4,
  PHE_ERR_INTERNAL = 5
} phe_status;

PHASEEST_API const char* phe_last_error(void);
PHASEEST_API const char* phe_version(void);
PHASEEST_API const char* phe_status_name(phe_status status);

/* ---- Fisher information and bounds ---------------------------------- */

typedef struct phe_bound_report {
  double r;
  double phi;
  double fisher_h; /* homodyne Fisher information at (r, phi) */
  double fisher_d; /* double-homodyne Fisher information, 4 sinh^2 r */
  double qfi;      /* 2 sinh^2(2r) */
  double var_opt;  /* 1/qfi, +inf when qfi = 0 */
  double phi_h;    /* optimal homodyne phase for r */
  double r_opt;    /* optimal squeezing for phi (reflected above pi/4) */
} phe_bound_report;

PHASEEST_API phe_status phe_bounds(double r, double phi, phe_bound_report* out);
PHASEEST_API phe_status phe_fisher_homodyne(double r, double phi, double* out);
PHASEEST_API phe_status phe_fisher_heterodyne(double r, double* out);
PHASEEST_API phe_status phe_qfi(double r, double* out);
PHASEEST_API phe_status phe_optimal_phase(double r, double* out);
PHASEEST_API phe_status phe_optimal_squeezing(double phi, double* out);
PHASEEST_API phe_status phe_ratio_r(double r, double phi_star, int64_t m, double* out);
PHASEEST_API phe_status phe_gaussian_approx_variance(double r, double phi_star, int64_t m,
                                                     double* out);
PHASEEST_API phe_status phe_gamma_ratio(double r, double phi_star, int64_t m, int32_t grid_size,
                                        double* out);

/* ---- Posterior grids ------------------------------------------------- */

typedef struct phe_posterior phe_posterior;

typedef struct phe_posterior_summary {
  double lower;
  double upper;
  double mean;
  double mode;
  double variance;
  double skewness; /* NaN when the variance is zero */
  double log_norm;
  int32_t flat;
  size_t size;
} phe_posterior_summary;

/* grid_size <= 0 selects the default (2048). */
PHASEEST_API phe_status phe_posterior_sampled(double r, double phi_star, int64_t m, uint64_t seed,
                                              int32_t grid_size, phe_posterior** out);
PHASEEST_API phe_status phe_posterior_from_statistics(int64_t count, double sum_sq, double r,
                                                      int32_t grid_size, phe_posterior** out);
PHASEEST_API phe_status phe_posterior_from_samples(const double* xs, size_t n, double r,
                                                   int32_t grid_size, phe_posterior** out);
PHASEEST_API phe_status phe_posterior_asymptotic(double r, double phi_star, int64_t m,
                                                 int32_t grid_size, phe_posterior** out);
PHASEEST_API phe_status phe_posterior_summarize(const phe_posterior* post,
                                                phe_posterior_summary* out);
/* Copies up to capacity points; either output array may be NULL. */
PHASEEST_API phe_status phe_posterior_copy(const phe_posterior* post, double* phis,
                                           double* density, size_t capacity);
/* path NULL or "-" writes to stdout. */
PHASEEST_API phe_status phe_posterior_write_csv(const phe_posterior* post, const char* path);
PHASEEST_API void phe_posterior_free(phe_posterior* post);

/* ---- Two-step runs and experiments ----------------------------------- */

typedef enum phe_scheme {
  PHE_SCHEME_NONE = 0,
  PHE_SCHEME_SQUEEZE = 1,
  PHE_SCHEME_PHASE = 2
} phe_scheme;

PHASEEST_API phe_status phe_scheme_parse(const char* name, phe_scheme* out);

typedef struct phe_two_step_options {
  phe_scheme scheme;
  double r;
  double phi_star;
  int64_t m;
  uint64_t seed;
  int32_t grid_size;        /* <= 0: default */
  int64_t n_rough;          /* <= 0: floor(3 sqrt(M)) */
  int32_t reuse_rough_data; /* nonzero: keep stage-1 data in the final posterior */
  double clamp_sigmas;
  int32_t inject_rough;     /* nonzero: use injected_rough instead of the stage-1 mode */
  double injected_rough;
} phe_two_step_options;

typedef struct phe_two_step_result {
  double mean;
  double variance;
  double mode;
  double rough_estimate;
  double retuned_r;
  double phase_offset;
  int32_t reflected;
  int32_t clamped;
  int64_t stage1_count;
  int64_t stage2_count;
  double stage2_mean;
  double stage2_variance;
} phe_two_step_result;

PHASEEST_API void phe_two_step_options_init(phe_two_step_options* options);
PHASEEST_API phe_status phe_run_two_step(const phe_two_step_options* options,
                                         phe_two_step_result* out);

typedef struct phe_experiment_config {
  double r;
  double phi_star;
  const int64_t* m_values; /* borrowed; copied by phe_experiment_run */
  size_t m_count;
  int32_t repetitions;
  phe_scheme scheme;
  uint64_t seed;
  int32_t grid_size;
  int64_t fixed_n_rough; /* <= 0: floor(3 sqrt(M)) */
  int32_t reuse_rough_data;
  double clamp_sigmas;
  uint32_t threads; /* 0: hardware concurrency */
} phe_experiment_config;

typedef struct phe_aggregate {
  int64_t m;
  double a;
  double a_stderr;
  double v;
  double v_stderr;
  double mean_rough;
  int32_t clamp_count;
  double mean_estimate;
  double mean_variance;
  double ensemble_variance;
  int32_t n_ok;
  int32_t n_failed;
} phe_aggregate;

typedef struct phe_experiment phe_experiment;

PHASEEST_API void phe_experiment_config_init(phe_experiment_config* config);
PHASEEST_API phe_status phe_experiment_validate(const phe_experiment_config* config);
PHASEEST_API phe_status phe_experiment_run(const phe_experiment_config* config,
                                           phe_experiment** out);
PHASEEST_API size_t phe_experiment_aggregate_count(const phe_experiment* exp);
PHASEEST_API phe_status phe_experiment_aggregate(const phe_experiment* exp, size_t index,
                                                 phe_aggregate* out);
/* path NULL or "-" writes to stdout. */
PHASEEST_API phe_status phe_experiment_write_csv(const phe_experiment* exp, const char* path);
PHASEEST_API phe_status phe_experiment_write_json(const phe_experiment* exp, const char* path);
PHASEEST_API void phe_experiment_free(phe_experiment* exp);

/* Log-spaced integer grid lo..hi; *written receives the number of values. */
PHASEEST_API phe_status phe_log_grid(int64_t lo, int64_t hi, int32_t points, int64_t* out,
                                     size_t capacity, size_t* written);

#ifdef __cplusplus
}
#endif

#endif /* PHASEEST_H */
