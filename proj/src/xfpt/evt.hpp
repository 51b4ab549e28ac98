#pragma once

#include <cstdint>
#include <vector>

#include "xfpt/common.hpp"
#include "xfpt/fpt.hpp"

namespace xfpt {

// Statistics of T_N = min over N independent walkers of the single-walker
// first-passage time described by dist.
struct ExtremeQuery {
    const FptDistribution* dist;
    int64_t n_walkers;

    double lambda() const { return static_cast<double>(n_walkers) * dist->p_d(); }
};

enum class MeanMode { unconditional, conditional };

// Value plus a bound/estimate for the part of the series the horizon cut off.
struct SumResult {
    double value;
    double tail_bound;
};

// P(T_N > d + k), from exact masses. Returns 1 for k < 0 (the hard edge).
double extreme_tail_exact(const ExtremeQuery& q, int64_t k);

// P(T_N = d) = 1 - (1 - p_d)^N.
double extreme_hit_prob(const ExtremeQuery& q);

// Survival-sum mean of T_N. Unconditional diverges whenever the walker can
// fail to arrive, so that mode requires a defect-free distribution; the
// conditional mode is conditioned on some walker arriving within the horizon.
SumResult mean_exact(const ExtremeQuery& q, MeanMode mode);

// E[(T_N - d)^m] via the telescoped tail sum with exact tails.
SumResult moment_exact(const ExtremeQuery& q, int order, MeanMode mode);

// Var[T_N] from the first two exact moments.
SumResult variance_exact(const ExtremeQuery& q, MeanMode mode);

/**
 * Entropic detour profile F(k) = sum_{j<=k} p_{d+j} / p_d. F(0) == 1;
 * nondecreasing. f_infinity is the saturation value (total arrival mass over
 * p_d) when the distribution's defect is exact, NaN otherwise.
 */
struct EntropicProfile {
    enum class Source { closed_form, from_pmf };

    std::vector<double> f;  // F(0..k_max)
    Source source;
    double f_infinity;

    int64_t k_max() const { return static_cast<int64_t>(f.size()) - 1; }
    double at(int64_t k) const;
};

EntropicProfile profile_from_pmf(const FptDistribution& dist, int64_t k_max);

// Closed form for the one-node loop head: F(k) = (1 - s^(k+1)) / (1 - s).
double f_leaky_closed(double stay, int64_t k);
EntropicProfile profile_leaky_closed(double stay, int64_t k_max);

// Limiting tail P(T_N > d + k) -> exp(-lambda F(k)).
double tail_asymptotic(double lambda, const EntropicProfile& profile, int64_t k);

enum class AsymMode { truncated, conditional };

// Limiting mean d + sum_k exp(-lambda F(k)). The raw series saturates at
// exp(-lambda F_inf) > 0 whenever the walker can fail to arrive, so it is
// either truncated at trunc_k (trunc_k < 0 picks ceil(ln N) via
// default_trunc_k at call sites) or conditioned on arrival.
SumResult mean_asymptotic(int64_t hard_edge, double lambda, const EntropicProfile& profile,
                          AsymMode mode, int64_t trunc_k);

// Limiting E[(T_N - d)^m] by the same telescoped sum.
SumResult moment_asymptotic(int order, double lambda, const EntropicProfile& profile,
                            AsymMode mode, int64_t trunc_k);

SumResult variance_asymptotic(double lambda, const EntropicProfile& profile, AsymMode mode,
                              int64_t trunc_k);

// Truncation point for the exponential body, k ~ ln N.
int64_t default_trunc_k(int64_t n_walkers);

// Walker count hitting a target lambda: N = max(1, round(lambda / p_d)).
int64_t n_for_lambda(const FptDistribution& dist, double lambda);

} // namespace xfpt
