/* C interface to the topostat library. All functions return a ts_status;
 * outputs are written through pointer arguments. On failure the thread-local
 * message from ts_last_error() names the problem (same text as the library's
 * internal errors, e.g. "ParseError: line 3: ...").
 *
 * Handles returned through ts_*_create/read functions own their data and
 * must be released with the matching ts_*_free (NULL is a safe no-op).
 */
#ifndef TOPOSTAT_H
#define TOPOSTAT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ts_status {
  TS_OK = 0,
  TS_ERR_INVALID_ARGUMENT = 1,
  TS_ERR_PARSE = 2,
  TS_ERR_VALIDATION = 3,
  TS_ERR_DIMENSION = 4,
  TS_ERR_NUMERIC = 5,
  TS_ERR_SINGULAR = 6,
  TS_ERR_CONVERGENCE = 7,
  TS_ERR_IO = 8,
  TS_ERR_CONFIG = 9,
  TS_ERR_NULL_POINTER = 10,
  TS_ERR_INTERNAL = 11,
} ts_status;

/* Message for the most recent failing call on the calling thread; never NULL. */
const char* ts_last_error(void);

typedef struct ts_complex ts_complex;
typedef struct ts_basis ts_basis;
typedef struct ts_ensemble ts_ensemble;
typedef struct ts_covariance ts_covariance;
typedef struct ts_experiment ts_experiment;

/* ---- simplicial complexes ---- */
ts_status ts_complex_random(int n0, double p_edge, double p_tri, uint64_t seed, ts_complex** out);
ts_status ts_complex_read_scf(const char* path, ts_complex** out);
ts_status ts_complex_write_scf(const ts_complex* complex, const char* path);
ts_status ts_complex_order(const ts_complex* complex, int* out);
ts_status ts_complex_count(const ts_complex* complex, int k, int* out);
ts_status ts_complex_total_size(const ts_complex* complex, int* out);
void ts_complex_free(ts_complex* complex);

/* ---- spectral bases; operator_spec is "dirac" or "hodge:<k>" ---- */
ts_status ts_basis_create(const ts_complex* complex, const char* operator_spec, ts_basis** out);
ts_status ts_basis_size(const ts_basis* basis, int* out);
/* Buffers must hold ts_basis_size entries. */
ts_status ts_basis_eigenvalues(const ts_basis* basis, double* out);
/* 'G'/'C'/'H' per column; fails for (unlabeled) Dirac bases. */
ts_status ts_basis_labels(const ts_basis* basis, char* out);
void ts_basis_free(ts_basis* basis);

/* ---- signal ensembles ----
 * filter_spec uses the textual form "ma:0.1,0.1,0.1" | "ar:0.3" |
 * "lowpass:0.001" | "exponential:t" | "sigmoid:t1,t2" | "gaussian:t" |
 * "laplacian:t1,t2".
 */
ts_status ts_ensemble_generate(const ts_basis* basis, const char* filter_spec, int m,
                               uint64_t seed, ts_ensemble** out);
/* Column-major rows x cols data; operator_spec may be NULL (plain matrix). */
ts_status ts_ensemble_create(int rows, int cols, const double* column_major,
                             const char* operator_spec, ts_ensemble** out);
ts_status ts_ensemble_read_csv(const char* path, ts_ensemble** out);
ts_status ts_ensemble_write_csv(const ts_ensemble* signals, const char* path);
ts_status ts_ensemble_shape(const ts_ensemble* signals, int* rows, int* cols);
/* Buffer must hold rows*cols entries; filled column-major. */
ts_status ts_ensemble_data(const ts_ensemble* signals, double* out);
void ts_ensemble_free(ts_ensemble* signals);

/* ---- covariance / PSD estimation ----
 * method is one of: sample, correlogram, periodogram, ma-spatial,
 * ma-spectral, ar-spatial, ar-spectral, wirtinger, ar1-mle, kernel:<model>.
 */
ts_status ts_estimate_covariance(const ts_basis* basis, const ts_ensemble* signals,
                                 const char* method, int fit_order, ts_covariance** out);
/* Model covariance/PSD of a filter, packaged like an estimate. */
ts_status ts_true_covariance(const ts_basis* basis, const char* filter_spec, ts_covariance** out);
/* Explicit PSD (ts_basis_size entries) packaged as U diag(psd) U^T. */
ts_status ts_psd_covariance(const ts_basis* basis, const double* psd, int count,
                            ts_covariance** out);
ts_status ts_covariance_size(const ts_covariance* est, int* out);
/* Buffer holds size*size entries, column-major. */
ts_status ts_covariance_matrix(const ts_covariance* est, double* out);
/* has_psd reports whether the method defines a PSD (sample does not). */
ts_status ts_covariance_has_psd(const ts_covariance* est, int* has_psd);
ts_status ts_covariance_psd(const ts_covariance* est, double* out);
/* Pointer into the estimate; valid until the estimate is freed. Empty string
 * when the estimate is clean. */
ts_status ts_covariance_flags(const ts_covariance* est, const char** out);
ts_status ts_covariance_write_psd_csv(const ts_covariance* est, const char* path);
ts_status ts_covariance_write_matrix_csv(const ts_covariance* est, const char* path);
void ts_covariance_free(ts_covariance* est);

/* Squared relative Frobenius distance between the two estimates' matrices. */
ts_status ts_covariance_rel_error(const ts_covariance* estimate, const ts_covariance* reference,
                                  double* out);

/* ---- recovery ---- */
/* Wiener denoising with the estimate's PSD (derived from the matrix via the
 * correlogram when the method defines none). */
ts_status ts_wiener_denoise(const ts_basis* basis, const ts_covariance* est,
                            double noise_variance, const ts_ensemble* noisy, ts_ensemble** out);
/* Interpolates observed rows (ascending indices into the full signal) back to
 * full length. prior is one of:
 *   map          MMSE with C = U diag(psd) U^T         (psd required)
 *   smooth       Laplacian / squared-Dirac quadratic    (psd ignored)
 *   sem:<alpha>  structural equation prior (I-aT)^2     (psd ignored)
 *   zero         zero-fill Theta^T s_bar                (psd ignored)
 *   mixed:<g>    unit data weight, psd prior + g * smoothness (psd required)
 * psd, when required, holds ts_basis_size entries.
 */
ts_status ts_interpolate(const ts_basis* basis, const char* prior, const double* psd,
                         const int* observed, int observed_count, double noise_variance,
                         const ts_ensemble* observed_signals, ts_ensemble** out);
/* Uniform random mask of exactly observed_count ascending indices out of
 * [0, size); deterministic given seed. Free with ts_free_ints. */
ts_status ts_random_mask(int size, int observed_count, uint64_t seed, int** indices, int* count);

/* ---- io helpers for PSD / mask files ---- */
ts_status ts_read_indexed_csv(const char* path, double** values, int* count);
ts_status ts_write_indexed_csv(const char* path, const double* values, int count);
ts_status ts_read_mask(const char* path, int** indices, int* count);
ts_status ts_write_mask(const char* path, const int* indices, int count);
/* Looks up one key in a flat "key = value" file; found is 0/1. value is
 * copied into the caller's buffer (truncated to cap-1 chars + NUL). */
ts_status ts_config_lookup(const char* path, const char* key, char* value, size_t cap,
                           int* found);
void ts_free_doubles(double* values);
void ts_free_ints(int* values);

/* ---- experiments ----
 * kind: cov-vs-m | denoise-vs-snr | interp-vs-observed
 * scale: desk | paper
 * Keys accepted by ts_experiment_set match the config-file keys: experiment,
 * n0, p_edge, p_tri, complex_file, operator, model, sweep, methods, trials,
 * master_seed, signals_m, noise_variance, sem_alpha, fit_order, mask_mode,
 * threads, timing.
 */
ts_status ts_experiment_create(const char* kind, const char* scale, ts_experiment** out);
ts_status ts_experiment_set(ts_experiment* config, const char* key, const char* value);
/* Applies every pair in a flat "key = value" file (later keys win). */
ts_status ts_experiment_load_config(ts_experiment* config, const char* path);
ts_status ts_experiment_run(const ts_experiment* config, const char* out_path);
void ts_experiment_free(ts_experiment* config);

#ifdef __cplusplus
}
#endif

#endif /* TOPOSTAT_H */
