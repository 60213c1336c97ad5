/*
 * C interface to the multipole miner.
 *
 * Objects are opaque handles created by the library and released with the
 * matching *_free function. Every fallible call returns an mp_status; on failure
 * mp_last_error() describes the problem for the calling thread.
 */
#ifndef MULTIPOLE_MULTIPOLE_H
#define MULTIPOLE_MULTIPOLE_H

#include <stddef.h>
#include <stdint.h>

#if defined(MULTIPOLE_BUILDING)
#define MP_API __attribute__((visibility("default")))
#else
#define MP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mp_status {
    MP_OK = 0,
    MP_ERR_INTERNAL = 1,
    MP_ERR_VALIDATION = 2,
    /* Budget exhausted. mp_mine still hands back the partial result. */
    MP_ERR_BUDGET = 3,
    MP_ERR_IO = 4
} mp_status;

typedef struct mp_dataset mp_dataset;
typedef struct mp_result mp_result;
typedef struct mp_scatter mp_scatter;
typedef struct mp_synth mp_synth;

MP_API const char* mp_version(void);
MP_API const char* mp_last_error(void);

/* ---- datasets ---------------------------------------------------------- */

MP_API mp_status mp_dataset_load_csv(const char* path, mp_dataset** out);
/* Zero mean, unit sample variance per column; detrend != 0 removes a linear trend first. */
MP_API mp_status mp_dataset_standardize(const mp_dataset* d, int detrend, mp_dataset** out);
MP_API mp_status mp_dataset_write_csv(const mp_dataset* d, const char* path);
MP_API size_t mp_dataset_width(const mp_dataset* d);
MP_API size_t mp_dataset_length(const mp_dataset* d);
MP_API const char* mp_dataset_name(const mp_dataset* d, size_t column);
MP_API void mp_dataset_free(mp_dataset* d);

/* ---- mining ------------------------------------------------------------ */

typedef struct mp_miner_config {
    double sigma;          /* minimum linear dependence, [0,1] */
    double delta;          /* minimum linear gain, (0,1] */
    double rho;            /* graph threshold, [-1,1] */
    int max_size;          /* 0 = floor((1+delta)/delta) */
    uint64_t seed;
    uint64_t clique_budget;
    unsigned threads;
} mp_miner_config;

/* sigma 0.5, delta 0.15, rho 0, derived max size, seed 0, budget 1e7, 1 thread. */
MP_API void mp_miner_config_init(mp_miner_config* cfg);

/* `d` must be standardized. */
MP_API mp_status mp_mine(const mp_dataset* d, const mp_miner_config* cfg, mp_result** out);
MP_API mp_status mp_brute_force(const mp_dataset* d, const mp_miner_config* cfg,
                                uint64_t subset_budget, mp_result** out);
MP_API mp_status mp_random_search(const mp_dataset* d, const mp_miner_config* cfg,
                                  uint64_t trials, mp_result** out);

MP_API mp_status mp_result_read_json(const char* path, mp_result** out);
/* Union of `count` results with duplicate and non-maximal sets removed. */
MP_API mp_status mp_result_merge(const mp_result* const* parts, size_t count, mp_result** out);
MP_API mp_status mp_result_write_json(const mp_result* r, const char* path);
MP_API mp_status mp_result_write_csv(const mp_result* r, const char* path);

MP_API size_t mp_result_count(const mp_result* r);
MP_API int mp_result_partial(const mp_result* r);
MP_API size_t mp_result_candidates(const mp_result* r);
MP_API size_t mp_result_size(const mp_result* r, size_t i);
MP_API const char* mp_result_member(const mp_result* r, size_t i, size_t j);
MP_API int mp_result_sign(const mp_result* r, size_t i, size_t j);
MP_API double mp_result_weight(const mp_result* r, size_t i, size_t j);
MP_API double mp_result_sigma(const mp_result* r, size_t i);
MP_API double mp_result_gain(const mp_result* r, size_t i);
MP_API void mp_result_free(mp_result* r);

/* ---- measures on a raw k x k row-major correlation matrix --------------- */

MP_API mp_status mp_linear_dependence(const double* corr, size_t k, double* out);
MP_API mp_status mp_linear_gain(const double* corr, size_t k, double* out);
MP_API mp_status mp_max_size_for_gain(double delta, int* out);

/* ---- random matrices and bounds ---------------------------------------- */

MP_API mp_status mp_scatter_run(int k, uint64_t count, uint64_t seed, unsigned threads,
                                mp_scatter** out);
MP_API size_t mp_scatter_count(const mp_scatter* s);
MP_API double mp_scatter_gain(const mp_scatter* s, size_t i);
MP_API double mp_scatter_rho_s(const mp_scatter* s, size_t i);
MP_API double mp_scatter_max_gain(const mp_scatter* s);
/* Samples with gain >= delta and rho_s > 1 - 3 delta. */
MP_API size_t mp_scatter_boundary_violations(const mp_scatter* s, double delta);
/* CSV "k,gain,rho_s". */
MP_API mp_status mp_scatter_write_csv(const mp_scatter* s, const char* path);
MP_API void mp_scatter_free(mp_scatter* s);

typedef struct mp_bounds_summary {
    uint64_t matrices;
    uint64_t theorem1_violations;
    uint64_t corollary1_violations;
    uint64_t corollary2_violations;
    uint64_t size_cap_violations;
    double max_gain;
} mp_bounds_summary;

/* Samples `count` PSD matrices of size k and checks every bound; csv_path may be NULL. */
MP_API mp_status mp_bounds_validate(int k, uint64_t count, uint64_t seed, unsigned threads,
                                    const char* csv_path, mp_bounds_summary* out);

/* ---- synthetic data ---------------------------------------------------- */

typedef struct mp_synth_params {
    size_t plant_count;
    const int* sizes; /* cycled over planted sets */
    size_t size_count;
    size_t total_width; /* planted columns plus noise columns */
    size_t length;
    uint64_t seed;
    double min_sigma;
    double min_gain;
    double max_rho_s; /* 1 disables the filter */
} mp_synth_params;

MP_API void mp_synth_params_init(mp_synth_params* p);
MP_API mp_status mp_synth_run(const mp_synth_params* p, mp_synth** out);
/* Borrowed; valid until mp_synth_free. */
MP_API const mp_dataset* mp_synth_dataset(const mp_synth* s);
MP_API size_t mp_synth_truth_count(const mp_synth* s);
MP_API mp_status mp_synth_write_truth_json(const mp_synth* s, const char* path);
MP_API void mp_synth_free(mp_synth* s);

/* ---- significance ------------------------------------------------------ */

typedef struct mp_signif_params {
    size_t samples;
    size_t repeats;
    double alpha;
    uint64_t seed;
    unsigned threads;
} mp_signif_params;

typedef struct mp_signif_report {
    double sigma;
    double p_sigma;
    int significant;
    size_t reproducible_count;
} mp_signif_report;

MP_API void mp_signif_params_init(mp_signif_params* p);

/* Tests the named multipole on `d` against the standardized `pool`; member
 * p-values are written to member_p (length member_count). When window_count > 0
 * the multipole is also re-tested on each window. */
MP_API mp_status mp_significance(const mp_dataset* d, const char* const* members,
                                 size_t member_count, const mp_dataset* const* pool,
                                 size_t pool_count, const mp_dataset* const* windows,
                                 size_t window_count, const mp_signif_params* params,
                                 double* member_p, mp_signif_report* out);

#ifdef __cplusplus
}
#endif

#endif
