/*
 * xfpt - extreme first-passage statistics of N independent discrete-time
 * random walkers on hierarchical graphs (comet / leaky-loop / Bethe models).
 *
 * C API of the shared library. All objects are opaque handles created and
 * released through these functions; every fallible call returns a status
 * code (XFPT_OK on success) and reports details via xfpt_last_error().
 * Handles are immutable after creation and may be shared across threads.
 */
#ifndef XFPT_H
#define XFPT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
    XFPT_OK = 0,
    XFPT_E_INVALID = 1,        /* argument outside its domain */
    XFPT_E_MODEL = 2,          /* model violates a structural invariant */
    XFPT_E_HORIZON = 3,        /* query beyond the computed horizon */
    XFPT_E_PRECISION = 4,      /* horizon too small for the requested precision */
    XFPT_E_DIVERGENT = 5,      /* unconditional mean of a defective law */
    XFPT_E_NONCONVERGENT = 6,  /* conditional asymptotics without a saturating F */
    XFPT_E_SIZE_GUARD = 7,     /* enumeration guard tripped */
    XFPT_E_UNDERFLOW = 8,      /* probability underflowed double range */
    XFPT_E_NO_ARRIVALS = 9,    /* every Monte Carlo trial ended without an arrival */
    XFPT_E_PARSE = 10,
    XFPT_E_IO = 11,
    XFPT_E_INTERNAL = 99
};

/* sampling modes */
enum { XFPT_SAMPLING_DIRECT_WALK = 0, XFPT_SAMPLING_INVERSE_CDF = 1 };
/* exact-mean modes */
enum { XFPT_MEAN_UNCONDITIONAL = 0, XFPT_MEAN_CONDITIONAL = 1 };
/* asymptotic-mean modes */
enum { XFPT_ASYM_TRUNCATED = 0, XFPT_ASYM_CONDITIONAL = 1 };

typedef struct xfpt_model xfpt_model;         /* a graph model (comet, leaky loop, Bethe) */
typedef struct xfpt_dist xfpt_dist;           /* single-walker first-passage law */
typedef struct xfpt_profile xfpt_profile;     /* entropic detour profile F(k) */
typedef struct xfpt_mc_result xfpt_mc_result; /* aggregated Monte Carlo trials */
typedef struct xfpt_report xfpt_report;       /* regime classification report */

const char* xfpt_version(void);
const char* xfpt_status_name(int status);
/* message of the most recent failure on the calling thread */
const char* xfpt_last_error(void);
/* releases strings returned as char* by this API */
void xfpt_string_free(char* s);

/* ---- models ----------------------------------------------------------- */

int xfpt_model_leaky_loop(double s, double mu, int64_t d, xfpt_model** out);
int xfpt_model_comet_clique(int32_t m, int32_t start, int32_t exit_node, int64_t tail_hops,
                            double mu, xfpt_model** out);
int xfpt_model_bethe(int32_t z, int64_t d, xfpt_model** out);
/* {"model":"comet"|"leaky-loop"|"bethe", ...}; see README for the schema */
int xfpt_model_from_json(const char* json_text, xfpt_model** out);
char* xfpt_model_to_json(const xfpt_model* model);
int64_t xfpt_model_distance(const xfpt_model* model);
/* invariant violations as a JSON array of strings; *count receives its length
 * (0 means the model is valid) */
int xfpt_model_validate(const xfpt_model* model, char** violations_json, size_t* count);
void xfpt_model_free(xfpt_model* model);

/* ---- exact first-passage laws ----------------------------------------- */

/* masses p_{d+k} for k = 0..k_max plus defect and beyond-horizon residual */
int xfpt_fpt_exact(const xfpt_model* model, int64_t k_max, xfpt_dist** out);
/* exhaustive trajectory enumeration up to t_max; the independent oracle */
int xfpt_fpt_brute_force(const xfpt_model* model, int64_t t_max, xfpt_dist** out);
int64_t xfpt_dist_hard_edge(const xfpt_dist* dist);
int64_t xfpt_dist_k_max(const xfpt_dist* dist);
int xfpt_dist_mass(const xfpt_dist* dist, int64_t k, double* out);
int xfpt_dist_survival(const xfpt_dist* dist, int64_t t, double* out);
double xfpt_dist_defect(const xfpt_dist* dist);
double xfpt_dist_residual_bound(const xfpt_dist* dist);
void xfpt_dist_free(xfpt_dist* dist);

/* ---- extreme-value statistics of T_N = min of N walkers ---------------- */

/* N = max(1, round(lambda / p_d)) */
int xfpt_n_for_lambda(const xfpt_dist* dist, double lambda, int64_t* n_out);
/* P(T_N > d + k) from exact masses; 1 for k < 0 */
int xfpt_extreme_tail_exact(const xfpt_dist* dist, int64_t n_walkers, int64_t k, double* out);
/* P(T_N = d) = 1 - (1 - p_d)^N */
int xfpt_extreme_hit_prob(const xfpt_dist* dist, int64_t n_walkers, double* out);
int xfpt_mean_exact(const xfpt_dist* dist, int64_t n_walkers, int mean_mode, double* value,
                    double* tail_bound);
/* E[(T_N - d)^order] by the telescoped tail sum */
int xfpt_moment_exact(const xfpt_dist* dist, int64_t n_walkers, int order, int mean_mode,
                      double* value, double* tail_bound);
int xfpt_variance_exact(const xfpt_dist* dist, int64_t n_walkers, int mean_mode, double* value);

/* F(k) = cumulative detour mass over p_d */
int xfpt_profile_from_pmf(const xfpt_dist* dist, int64_t k_max, xfpt_profile** out);
int xfpt_profile_leaky_closed(double s, int64_t k_max, xfpt_profile** out);
double xfpt_f_leaky_closed(double s, int64_t k);
int xfpt_profile_value(const xfpt_profile* profile, int64_t k, double* out);
/* saturation limit of F, NaN when unknown */
double xfpt_profile_f_infinity(const xfpt_profile* profile);
int64_t xfpt_profile_k_max(const xfpt_profile* profile);
void xfpt_profile_free(xfpt_profile* profile);

/* limiting tail exp(-lambda F(k)) */
int xfpt_tail_asymptotic(double lambda, const xfpt_profile* profile, int64_t k, double* out);
/* limiting mean d + sum exp(-lambda F(k)); truncated at trunc_k or
 * conditioned on arrival (asym_mode) */
int xfpt_mean_asymptotic(int64_t hard_edge, double lambda, const xfpt_profile* profile,
                         int asym_mode, int64_t trunc_k, double* value);
int xfpt_moment_asymptotic(int order, double lambda, const xfpt_profile* profile, int asym_mode,
                           int64_t trunc_k, double* value);
int xfpt_variance_asymptotic(double lambda, const xfpt_profile* profile, int asym_mode,
                             int64_t trunc_k, double* value);
/* the k ~ ln N truncation point */
int64_t xfpt_default_trunc_k(int64_t n_walkers);

/* ---- Monte Carlo -------------------------------------------------------- */

/* One walker stepped under the model rules with the stream keyed
 * (seed, trial, walker); *arrival = -1 when killed or out past t_max. */
int xfpt_simulate_walker(const xfpt_model* model, uint64_t seed, uint64_t trial, uint64_t walker,
                         int64_t t_max, int64_t* arrival);
/* T_N of a single trial; -1 when no walker arrives */
int xfpt_sample_min_of_n(const xfpt_model* model, int64_t n_walkers, uint64_t seed, uint64_t trial,
                         int64_t t_max, int sampling, int64_t* min_arrival);
/* Aggregated trials. t_max = 0 picks d + 200; threads = 0 uses hardware
 * concurrency. Output is bit-identical for identical (arguments, seed)
 * at any thread count. */
int xfpt_mc_run(const xfpt_model* model, int64_t n_walkers, int64_t trials, uint64_t seed,
                int64_t t_max, int sampling, int threads, int64_t tail_k_max,
                xfpt_mc_result** out);
int64_t xfpt_mc_trials(const xfpt_mc_result* result);
int64_t xfpt_mc_trials_used(const xfpt_mc_result* result);
int64_t xfpt_mc_no_arrival_count(const xfpt_mc_result* result);
int64_t xfpt_mc_hard_edge(const xfpt_mc_result* result);
int64_t xfpt_mc_tail_k_max(const xfpt_mc_result* result);
/* empirical tail P(T_N > d + k) with its binomial standard error */
int xfpt_mc_tail(const xfpt_mc_result* result, int64_t k, double* p_hat, double* se);
double xfpt_mc_cond_mean(const xfpt_mc_result* result);
double xfpt_mc_cond_variance(const xfpt_mc_result* result);
double xfpt_mc_mean_se(const xfpt_mc_result* result);
int64_t xfpt_mc_hist_len(const xfpt_mc_result* result);
uint64_t xfpt_mc_hist_count(const xfpt_mc_result* result, int64_t k);
double xfpt_mc_wall_seconds(const xfpt_mc_result* result);
/* deterministic engine-level JSON (no timing fields) */
char* xfpt_mc_result_to_json(const xfpt_mc_result* result);
void xfpt_mc_result_free(xfpt_mc_result* result);

/* ---- regime diagnostics ------------------------------------------------- */

/* Sweeps the family of the given model block over d_list and classifies it
 * as injection-limited (F invariant in d) or bulk-limited (F grows with d).
 * Needs at least 3 distinct d values. */
int xfpt_diagnose(const char* family_model_json, const int64_t* d_list, size_t d_count,
                  int64_t k_max, double invariance_tol, double slope_significance,
                  xfpt_report** out);
const char* xfpt_report_classification(const xfpt_report* report);
double xfpt_report_invariance_score(const xfpt_report* report);
double xfpt_report_growth_slope(const xfpt_report* report);
double xfpt_report_growth_significance(const xfpt_report* report);
int64_t xfpt_report_growth_k(const xfpt_report* report);
size_t xfpt_report_d_count(const xfpt_report* report);
int64_t xfpt_report_d_value(const xfpt_report* report, size_t d_index);
int64_t xfpt_report_k_max(const xfpt_report* report);
int xfpt_report_f(const xfpt_report* report, size_t d_index, int64_t k, double* out);
char* xfpt_report_to_json(const xfpt_report* report);
void xfpt_report_free(xfpt_report* report);

/* Least-squares fit of p_{d+2}/p_d against d (needs >= 3 d values). */
int xfpt_bethe_ratio_slope(int32_t z, const int64_t* d_list, size_t d_count, double* slope,
                           double* intercept, double* residual_rms);
/* Drift speed d / mean conditional arrival time with a bootstrap 95% CI;
 * needs >= 1000 arrival times. */
int xfpt_estimate_drift(const xfpt_model* bethe_model, const int64_t* arrival_times, size_t count,
                        uint64_t bootstrap_seed, double* v_hat, double* ci_lo, double* ci_hi);

#ifdef __cplusplus
}
#endif

#endif /* XFPT_H */
