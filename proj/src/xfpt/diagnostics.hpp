#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xfpt/evt.hpp"
#include "xfpt/graph.hpp"

namespace xfpt {

// A model family parameterized by source-target distance: the head/branching
// structure is fixed and d sweeps.
class ModelFamily {
public:
    static ModelFamily leaky_loop(double stay, double survival);
    static ModelFamily comet(HeadGraph head, double survival);
    static ModelFamily bethe(int coordination);
    static ModelFamily of(const Model& model);  // family of the model's own kind

    Model at_distance(int64_t d) const;
    const std::string& name() const { return name_; }
    bool is_bethe() const { return kind_ == Kind::bethe; }
    int coordination() const { return coordination_; }

private:
    enum class Kind { leaky_loop, comet, bethe };

    Kind kind_ = Kind::leaky_loop;
    std::string name_;
    double stay_ = 0.0;
    double survival_ = 1.0;
    std::optional<HeadGraph> head_;
    int coordination_ = 3;
};

// F(k; d) for each d, from the exact distribution (never Monte Carlo).
std::map<int64_t, EntropicProfile> entropic_profile(const ModelFamily& family,
                                                    std::span<const int64_t> d_list, int64_t k_max);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;  // RMS of fit residuals
    double slope_se = 0.0;      // standard error of the slope (0 for an exact fit)
    double significance = 0.0;  // slope / slope_se; +inf when se is 0 and slope > 0
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

enum class Regime { injection_limited, bulk_limited, inconclusive };

const char* regime_name(Regime regime);

struct RegimeReport {
    std::string family;
    std::vector<int64_t> d_values;
    std::vector<std::vector<double>> f_matrix;  // [d index][k]
    double invariance_score = 0.0;              // max over k of the range of F(k; .)
    LinearFit growth_fit;                       // most significant positive trend of F(k; d) in d
    int64_t growth_k = 0;                       // k at which that trend was measured
    Regime classification = Regime::inconclusive;
    double invariance_tol = 1e-9;
    double slope_significance = 5.0;
    std::optional<double> drift_estimate;  // attached for bulk-limited families when sampled
    // p_{d+2l}/p_d per excursion count l (rows) and d (columns); the l = 1 row
    // is the linear-in-d diagnostic, the higher rows are reported untested
    std::vector<std::vector<double>> excursion_ratios;
};

RegimeReport classify(const ModelFamily& family, std::span<const int64_t> d_list, int64_t k_max,
                      double invariance_tol = 1e-9, double slope_significance = 5.0);

// Least-squares fit of p_{d+2}/p_d against d from the distance-chain masses.
LinearFit bethe_ratio_slope(int coordination, std::span<const int64_t> d_list);

struct DriftEstimate {
    double v_hat = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    int64_t sample_count = 0;
};

// v = d / mean conditional arrival time, with a bootstrap percentile CI.
// Requires at least 1000 conditional arrivals.
DriftEstimate estimate_drift(const BetheSpec& spec, std::span<const int64_t> arrival_times,
                             uint64_t bootstrap_seed, int bootstrap_rounds = 256);

// Unbiased distance chain (one step toward, one step away, equal odds): the
// diffusive reference for drift estimates. Deliberately bypasses the z >= 3
// model guard; diagnostics-only.
std::vector<int64_t> sample_diffusive_reference(int64_t d, int64_t t_max, int64_t walkers,
                                                uint64_t seed);

std::string regime_report_json(const RegimeReport& report);

} // namespace xfpt
