#include "xfpt.h"

#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "xfpt/diagnostics.hpp"
#include "xfpt/evt.hpp"
#include "xfpt/fpt.hpp"
#include "xfpt/graph.hpp"
#include "xfpt/mc.hpp"
#include "xfpt/model_json.hpp"
#include "xfpt/rng.hpp"

struct xfpt_model {
    xfpt::Model value;
};
struct xfpt_dist {
    xfpt::FptDistribution value;
};
struct xfpt_profile {
    xfpt::EntropicProfile value;
};
struct xfpt_mc_result {
    xfpt::McResult value;
};
struct xfpt_report {
    xfpt::RegimeReport value;
};

namespace {

thread_local std::string g_last_error;

int status_of(xfpt::errc code) {
    using xfpt::errc;
    switch (code) {
        case errc::ok: return XFPT_OK;
        case errc::invalid_argument: return XFPT_E_INVALID;
        case errc::invalid_model: return XFPT_E_MODEL;
        case errc::horizon_exceeded: return XFPT_E_HORIZON;
        case errc::horizon_too_small: return XFPT_E_PRECISION;
        case errc::divergent_mean: return XFPT_E_DIVERGENT;
        case errc::nonconvergent: return XFPT_E_NONCONVERGENT;
        case errc::size_guard: return XFPT_E_SIZE_GUARD;
        case errc::underflow: return XFPT_E_UNDERFLOW;
        case errc::no_arrivals: return XFPT_E_NO_ARRIVALS;
        case errc::parse_error: return XFPT_E_PARSE;
        case errc::io_error: return XFPT_E_IO;
    }
    return XFPT_E_INTERNAL;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return XFPT_OK;
    } catch (const xfpt::Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return XFPT_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return XFPT_E_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

xfpt::Sampling sampling_of(int mode) {
    xfpt::require(mode == XFPT_SAMPLING_DIRECT_WALK || mode == XFPT_SAMPLING_INVERSE_CDF,
                  xfpt::errc::invalid_argument, "unknown sampling mode");
    return mode == XFPT_SAMPLING_DIRECT_WALK ? xfpt::Sampling::direct_walk
                                             : xfpt::Sampling::inverse_cdf;
}

xfpt::MeanMode mean_mode_of(int mode) {
    xfpt::require(mode == XFPT_MEAN_UNCONDITIONAL || mode == XFPT_MEAN_CONDITIONAL,
                  xfpt::errc::invalid_argument, "unknown mean mode");
    return mode == XFPT_MEAN_UNCONDITIONAL ? xfpt::MeanMode::unconditional
                                           : xfpt::MeanMode::conditional;
}

xfpt::AsymMode asym_mode_of(int mode) {
    xfpt::require(mode == XFPT_ASYM_TRUNCATED || mode == XFPT_ASYM_CONDITIONAL,
                  xfpt::errc::invalid_argument, "unknown asymptotic mode");
    return mode == XFPT_ASYM_TRUNCATED ? xfpt::AsymMode::truncated : xfpt::AsymMode::conditional;
}

} // namespace

extern "C" {

const char* xfpt_version(void) { return "0.1.0"; }

const char* xfpt_status_name(int status) {
    switch (status) {
        case XFPT_OK: return "ok";
        case XFPT_E_INVALID: return "invalid argument";
        case XFPT_E_MODEL: return "invalid model";
        case XFPT_E_HORIZON: return "horizon exceeded";
        case XFPT_E_PRECISION: return "horizon too small for target precision";
        case XFPT_E_DIVERGENT: return "divergent mean";
        case XFPT_E_NONCONVERGENT: return "nonconvergent conditional asymptotics";
        case XFPT_E_SIZE_GUARD: return "size guard exceeded";
        case XFPT_E_UNDERFLOW: return "probability underflow";
        case XFPT_E_NO_ARRIVALS: return "no arrivals";
        case XFPT_E_PARSE: return "parse error";
        case XFPT_E_IO: return "io error";
        default: return "internal error";
    }
}

const char* xfpt_last_error(void) { return g_last_error.c_str(); }

void xfpt_string_free(char* s) { delete[] s; }

/* ---- models ----------------------------------------------------------- */

int xfpt_model_leaky_loop(double s, double mu, int64_t d, xfpt_model** out) {
    return guarded([&] { *out = new xfpt_model{xfpt::build_leaky_loop(s, mu, d)}; });
}

int xfpt_model_comet_clique(int32_t m, int32_t start, int32_t exit_node, int64_t tail_hops,
                            double mu, xfpt_model** out) {
    return guarded([&] {
        xfpt::CometSpec spec{xfpt::build_clique_head(m, start, exit_node), tail_hops, mu};
        xfpt::require_valid(xfpt::Model(spec));
        *out = new xfpt_model{std::move(spec)};
    });
}

int xfpt_model_bethe(int32_t z, int64_t d, xfpt_model** out) {
    return guarded([&] {
        xfpt::BetheSpec spec{z, d};
        xfpt::require_valid(xfpt::Model(spec));
        *out = new xfpt_model{spec};
    });
}

int xfpt_model_from_json(const char* json_text, xfpt_model** out) {
    return guarded([&] {
        xfpt::require(json_text != nullptr, xfpt::errc::invalid_argument, "null JSON text");
        *out = new xfpt_model{xfpt::model_from_json_text(json_text)};
    });
}

char* xfpt_model_to_json(const xfpt_model* model) {
    if (!model) return nullptr;
    return dup_string(xfpt::model_to_json(model->value).dump());
}

int64_t xfpt_model_distance(const xfpt_model* model) {
    return model ? xfpt::model_distance(model->value) : -1;
}

int xfpt_model_validate(const xfpt_model* model, char** violations_json, size_t* count) {
    return guarded([&] {
        xfpt::require(model != nullptr, xfpt::errc::invalid_argument, "null model");
        auto violations = xfpt::validate(model->value);
        if (count) *count = violations.size();
        if (violations_json) {
            nlohmann::json j = violations;
            *violations_json = dup_string(j.dump());
        }
    });
}

void xfpt_model_free(xfpt_model* model) { delete model; }

/* ---- exact first-passage laws ----------------------------------------- */

int xfpt_fpt_exact(const xfpt_model* model, int64_t k_max, xfpt_dist** out) {
    return guarded([&] {
        xfpt::require(model != nullptr, xfpt::errc::invalid_argument, "null model");
        *out = new xfpt_dist{xfpt::fpt_exact(model->value, k_max)};
    });
}

int xfpt_fpt_brute_force(const xfpt_model* model, int64_t t_max, xfpt_dist** out) {
    return guarded([&] {
        xfpt::require(model != nullptr, xfpt::errc::invalid_argument, "null model");
        *out = new xfpt_dist{xfpt::brute_force_fpt(model->value, t_max)};
    });
}

int64_t xfpt_dist_hard_edge(const xfpt_dist* dist) { return dist->value.hard_edge(); }
int64_t xfpt_dist_k_max(const xfpt_dist* dist) { return dist->value.k_max(); }

int xfpt_dist_mass(const xfpt_dist* dist, int64_t k, double* out) {
    return guarded([&] { *out = dist->value.mass(k); });
}

int xfpt_dist_survival(const xfpt_dist* dist, int64_t t, double* out) {
    return guarded([&] { *out = dist->value.survival(t); });
}

double xfpt_dist_defect(const xfpt_dist* dist) { return dist->value.defect(); }
double xfpt_dist_residual_bound(const xfpt_dist* dist) { return dist->value.residual_bound(); }
void xfpt_dist_free(xfpt_dist* dist) { delete dist; }

/* ---- extreme-value statistics ------------------------------------------ */

int xfpt_n_for_lambda(const xfpt_dist* dist, double lambda, int64_t* n_out) {
    return guarded([&] { *n_out = xfpt::n_for_lambda(dist->value, lambda); });
}

int xfpt_extreme_tail_exact(const xfpt_dist* dist, int64_t n_walkers, int64_t k, double* out) {
    return guarded(
        [&] { *out = xfpt::extreme_tail_exact({&dist->value, n_walkers}, k); });
}

int xfpt_extreme_hit_prob(const xfpt_dist* dist, int64_t n_walkers, double* out) {
    return guarded([&] { *out = xfpt::extreme_hit_prob({&dist->value, n_walkers}); });
}

int xfpt_mean_exact(const xfpt_dist* dist, int64_t n_walkers, int mean_mode, double* value,
                    double* tail_bound) {
    return guarded([&] {
        auto r = xfpt::mean_exact({&dist->value, n_walkers}, mean_mode_of(mean_mode));
        *value = r.value;
        if (tail_bound) *tail_bound = r.tail_bound;
    });
}

int xfpt_moment_exact(const xfpt_dist* dist, int64_t n_walkers, int order, int mean_mode,
                      double* value, double* tail_bound) {
    return guarded([&] {
        auto r = xfpt::moment_exact({&dist->value, n_walkers}, order, mean_mode_of(mean_mode));
        *value = r.value;
        if (tail_bound) *tail_bound = r.tail_bound;
    });
}

int xfpt_variance_exact(const xfpt_dist* dist, int64_t n_walkers, int mean_mode, double* value) {
    return guarded([&] {
        *value = xfpt::variance_exact({&dist->value, n_walkers}, mean_mode_of(mean_mode)).value;
    });
}

int xfpt_profile_from_pmf(const xfpt_dist* dist, int64_t k_max, xfpt_profile** out) {
    return guarded([&] { *out = new xfpt_profile{xfpt::profile_from_pmf(dist->value, k_max)}; });
}

int xfpt_profile_leaky_closed(double s, int64_t k_max, xfpt_profile** out) {
    return guarded([&] { *out = new xfpt_profile{xfpt::profile_leaky_closed(s, k_max)}; });
}

double xfpt_f_leaky_closed(double s, int64_t k) {
    double out = -1.0;
    guarded([&] { out = xfpt::f_leaky_closed(s, k); });
    return out;
}

int xfpt_profile_value(const xfpt_profile* profile, int64_t k, double* out) {
    return guarded([&] { *out = profile->value.at(k); });
}

double xfpt_profile_f_infinity(const xfpt_profile* profile) { return profile->value.f_infinity; }
int64_t xfpt_profile_k_max(const xfpt_profile* profile) { return profile->value.k_max(); }
void xfpt_profile_free(xfpt_profile* profile) { delete profile; }

int xfpt_tail_asymptotic(double lambda, const xfpt_profile* profile, int64_t k, double* out) {
    return guarded([&] { *out = xfpt::tail_asymptotic(lambda, profile->value, k); });
}

int xfpt_mean_asymptotic(int64_t hard_edge, double lambda, const xfpt_profile* profile,
                         int asym_mode, int64_t trunc_k, double* value) {
    return guarded([&] {
        *value = xfpt::mean_asymptotic(hard_edge, lambda, profile->value, asym_mode_of(asym_mode),
                                       trunc_k)
                     .value;
    });
}

int xfpt_moment_asymptotic(int order, double lambda, const xfpt_profile* profile, int asym_mode,
                           int64_t trunc_k, double* value) {
    return guarded([&] {
        *value = xfpt::moment_asymptotic(order, lambda, profile->value, asym_mode_of(asym_mode),
                                         trunc_k)
                     .value;
    });
}

int xfpt_variance_asymptotic(double lambda, const xfpt_profile* profile, int asym_mode,
                             int64_t trunc_k, double* value) {
    return guarded([&] {
        *value = xfpt::variance_asymptotic(lambda, profile->value, asym_mode_of(asym_mode), trunc_k)
                     .value;
    });
}

int64_t xfpt_default_trunc_k(int64_t n_walkers) {
    int64_t out = -1;
    guarded([&] { out = xfpt::default_trunc_k(n_walkers); });
    return out;
}

/* ---- Monte Carlo -------------------------------------------------------- */

int xfpt_simulate_walker(const xfpt_model* model, uint64_t seed, uint64_t trial, uint64_t walker,
                         int64_t t_max, int64_t* arrival) {
    return guarded([&] {
        auto rng = xfpt::RngStream::keyed(seed, trial, walker);
        *arrival = xfpt::simulate_walker(model->value, rng, t_max);
    });
}

int xfpt_sample_min_of_n(const xfpt_model* model, int64_t n_walkers, uint64_t seed, uint64_t trial,
                         int64_t t_max, int sampling, int64_t* min_arrival) {
    return guarded([&] {
        *min_arrival = xfpt::sample_min_of_n(model->value, n_walkers, seed, trial, t_max,
                                             sampling_of(sampling), nullptr);
    });
}

int xfpt_mc_run(const xfpt_model* model, int64_t n_walkers, int64_t trials, uint64_t seed,
                int64_t t_max, int sampling, int threads, int64_t tail_k_max,
                xfpt_mc_result** out) {
    return guarded([&] {
        xfpt::require(model != nullptr, xfpt::errc::invalid_argument, "null model");
        xfpt::McConfig config;
        config.model = model->value;
        config.n_walkers = n_walkers;
        config.trials = trials;
        config.seed = seed;
        config.t_max = t_max;
        config.mode = sampling_of(sampling);
        config.threads = threads;
        if (tail_k_max >= 0) config.tail_k_max = tail_k_max;
        *out = new xfpt_mc_result{xfpt::run_trials(config)};
    });
}

int64_t xfpt_mc_trials(const xfpt_mc_result* result) { return result->value.trials; }
int64_t xfpt_mc_trials_used(const xfpt_mc_result* result) { return result->value.trials_used; }
int64_t xfpt_mc_no_arrival_count(const xfpt_mc_result* result) {
    return result->value.no_arrival_count;
}
int64_t xfpt_mc_hard_edge(const xfpt_mc_result* result) { return result->value.hard_edge; }
int64_t xfpt_mc_tail_k_max(const xfpt_mc_result* result) {
    return static_cast<int64_t>(result->value.tail.size()) - 1;
}

int xfpt_mc_tail(const xfpt_mc_result* result, int64_t k, double* p_hat, double* se) {
    return guarded([&] {
        xfpt::require(k >= 0 && k < static_cast<int64_t>(result->value.tail.size()),
                      xfpt::errc::horizon_exceeded, "tail index beyond reported range");
        if (p_hat) *p_hat = result->value.tail[k];
        if (se) *se = result->value.tail_se[k];
    });
}

double xfpt_mc_cond_mean(const xfpt_mc_result* result) { return result->value.cond_mean; }
double xfpt_mc_cond_variance(const xfpt_mc_result* result) { return result->value.cond_var; }
double xfpt_mc_mean_se(const xfpt_mc_result* result) { return result->value.mean_se; }
int64_t xfpt_mc_hist_len(const xfpt_mc_result* result) {
    return static_cast<int64_t>(result->value.arrival_hist.size());
}
uint64_t xfpt_mc_hist_count(const xfpt_mc_result* result, int64_t k) {
    if (k < 0 || k >= static_cast<int64_t>(result->value.arrival_hist.size())) return 0;
    return result->value.arrival_hist[k];
}
double xfpt_mc_wall_seconds(const xfpt_mc_result* result) { return result->value.wall_seconds; }

char* xfpt_mc_result_to_json(const xfpt_mc_result* result) {
    return dup_string(xfpt::mc_result_json(result->value));
}

void xfpt_mc_result_free(xfpt_mc_result* result) { delete result; }

/* ---- regime diagnostics ------------------------------------------------- */

int xfpt_diagnose(const char* family_model_json, const int64_t* d_list, size_t d_count,
                  int64_t k_max, double invariance_tol, double slope_significance,
                  xfpt_report** out) {
    return guarded([&] {
        xfpt::require(family_model_json != nullptr && d_list != nullptr,
                      xfpt::errc::invalid_argument, "null diagnose input");
        nlohmann::json j = nlohmann::json::parse(family_model_json, nullptr, false);
        xfpt::require(!j.is_discarded(), xfpt::errc::parse_error, "family JSON does not parse");
        xfpt::ModelFamily family = xfpt::family_from_json(j);
        std::vector<int64_t> ds(d_list, d_list + d_count);
        *out = new xfpt_report{
            xfpt::classify(family, ds, k_max, invariance_tol, slope_significance)};
    });
}

const char* xfpt_report_classification(const xfpt_report* report) {
    return xfpt::regime_name(report->value.classification);
}
double xfpt_report_invariance_score(const xfpt_report* report) {
    return report->value.invariance_score;
}
double xfpt_report_growth_slope(const xfpt_report* report) { return report->value.growth_fit.slope; }
double xfpt_report_growth_significance(const xfpt_report* report) {
    return report->value.growth_fit.significance;
}
int64_t xfpt_report_growth_k(const xfpt_report* report) { return report->value.growth_k; }
size_t xfpt_report_d_count(const xfpt_report* report) { return report->value.d_values.size(); }
int64_t xfpt_report_d_value(const xfpt_report* report, size_t d_index) {
    if (d_index >= report->value.d_values.size()) return -1;
    return report->value.d_values[d_index];
}
int64_t xfpt_report_k_max(const xfpt_report* report) {
    if (report->value.f_matrix.empty()) return -1;
    return static_cast<int64_t>(report->value.f_matrix.front().size()) - 1;
}

int xfpt_report_f(const xfpt_report* report, size_t d_index, int64_t k, double* out) {
    return guarded([&] {
        xfpt::require(d_index < report->value.f_matrix.size(), xfpt::errc::invalid_argument,
                      "d index out of range");
        const auto& row = report->value.f_matrix[d_index];
        xfpt::require(k >= 0 && k < static_cast<int64_t>(row.size()), xfpt::errc::horizon_exceeded,
                      "k beyond the profile table");
        *out = row[k];
    });
}

char* xfpt_report_to_json(const xfpt_report* report) {
    return dup_string(xfpt::regime_report_json(report->value));
}

void xfpt_report_free(xfpt_report* report) { delete report; }

int xfpt_bethe_ratio_slope(int32_t z, const int64_t* d_list, size_t d_count, double* slope,
                           double* intercept, double* residual_rms) {
    return guarded([&] {
        std::vector<int64_t> ds(d_list, d_list + d_count);
        auto fit = xfpt::bethe_ratio_slope(z, ds);
        if (slope) *slope = fit.slope;
        if (intercept) *intercept = fit.intercept;
        if (residual_rms) *residual_rms = fit.residual_rms;
    });
}

int xfpt_estimate_drift(const xfpt_model* bethe_model, const int64_t* arrival_times, size_t count,
                        uint64_t bootstrap_seed, double* v_hat, double* ci_lo, double* ci_hi) {
    return guarded([&] {
        xfpt::require(bethe_model != nullptr && arrival_times != nullptr,
                      xfpt::errc::invalid_argument, "null drift input");
        const auto* spec = std::get_if<xfpt::BetheSpec>(&bethe_model->value);
        xfpt::require(spec != nullptr, xfpt::errc::invalid_argument,
                      "drift estimation applies to Bethe models");
        auto est = xfpt::estimate_drift(*spec, {arrival_times, count}, bootstrap_seed);
        if (v_hat) *v_hat = est.v_hat;
        if (ci_lo) *ci_lo = est.ci_lo;
        if (ci_hi) *ci_hi = est.ci_hi;
    });
}

} // extern "C"
