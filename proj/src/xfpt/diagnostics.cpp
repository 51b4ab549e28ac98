#include "xfpt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

#include "xfpt/fpt.hpp"
#include "xfpt/rng.hpp"

namespace xfpt {

ModelFamily ModelFamily::leaky_loop(double stay, double survival) {
    ModelFamily f;
    f.kind_ = Kind::leaky_loop;
    f.name_ = "leaky-loop";
    f.stay_ = stay;
    f.survival_ = survival;
    return f;
}

ModelFamily ModelFamily::comet(HeadGraph head, double survival) {
    ModelFamily f;
    f.kind_ = Kind::comet;
    f.name_ = "comet";
    f.head_ = std::move(head);
    f.survival_ = survival;
    return f;
}

ModelFamily ModelFamily::bethe(int coordination) {
    ModelFamily f;
    f.kind_ = Kind::bethe;
    f.name_ = "bethe";
    f.coordination_ = coordination;
    return f;
}

ModelFamily ModelFamily::of(const Model& model) {
    if (const auto* loop = std::get_if<LeakyLoopSpec>(&model))
        return leaky_loop(loop->stay, loop->survival);
    if (const auto* spec = std::get_if<CometSpec>(&model)) return comet(spec->head, spec->survival);
    return bethe(std::get<BetheSpec>(model).coordination);
}

Model ModelFamily::at_distance(int64_t d) const {
    switch (kind_) {
        case Kind::leaky_loop:
            return build_leaky_loop(stay_, survival_, d);
        case Kind::comet: {
            int64_t head_distance = head_->exit_hops() + 1;
            require(d > head_distance, errc::invalid_argument,
                    "comet family distance must exceed the head distance");
            return CometSpec{*head_, d - head_distance, survival_};
        }
        case Kind::bethe:
            return BetheSpec{coordination_, d};
    }
    fail(errc::invalid_argument, "unreachable family kind");
}

std::map<int64_t, EntropicProfile> entropic_profile(const ModelFamily& family,
                                                    std::span<const int64_t> d_list, int64_t k_max) {
    require(!d_list.empty(), errc::invalid_argument, "d list must be nonempty");
    std::map<int64_t, EntropicProfile> out;
    for (int64_t d : d_list) {
        FptDistribution dist = fpt_exact(family.at_distance(d), k_max);
        out.emplace(d, profile_from_pmf(dist, k_max));
    }
    return out;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, errc::invalid_argument,
            "fit needs matching x/y with at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0.0, errc::invalid_argument, "fit needs at least two distinct x values");

    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.residual_rms = std::sqrt(ss_res / n);
    if (x.size() > 2) {
        fit.slope_se = std::sqrt(ss_res / (n - 2.0) / sxx);
    } else {
        fit.slope_se = 0.0;  // two points fit exactly
    }
    if (fit.slope_se > 0.0)
        fit.significance = fit.slope / fit.slope_se;
    else
        fit.significance = fit.slope > 0.0 ? std::numeric_limits<double>::infinity()
                                           : (fit.slope < 0.0 ? -std::numeric_limits<double>::infinity()
                                                              : 0.0);
    return fit;
}

RegimeReport classify(const ModelFamily& family, std::span<const int64_t> d_list, int64_t k_max,
                      double invariance_tol, double slope_significance) {
    std::set<int64_t> distinct(d_list.begin(), d_list.end());
    require(distinct.size() >= 3, errc::invalid_argument,
            "classification needs at least 3 distinct d values");

    RegimeReport report;
    report.family = family.name();
    report.d_values.assign(distinct.begin(), distinct.end());
    report.invariance_tol = invariance_tol;
    report.slope_significance = slope_significance;

    auto profiles = entropic_profile(family, report.d_values, k_max);
    std::vector<double> d_as_double;
    for (int64_t d : report.d_values) {
        report.f_matrix.push_back(profiles.at(d).f);
        d_as_double.push_back(static_cast<double>(d));
    }

    // invariance score: worst spread of F(k; .) across d
    double score = 0.0;
    for (int64_t k = 0; k <= k_max; ++k) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& row : report.f_matrix) {
            lo = std::min(lo, row[k]);
            hi = std::max(hi, row[k]);
        }
        score = std::max(score, hi - lo);
    }
    report.invariance_score = score;

    // growth: strongest positive trend of F(k; d) in d over k >= 1
    report.growth_k = 0;
    bool significant_growth = false;
    for (int64_t k = 1; k <= k_max; ++k) {
        std::vector<double> column;
        for (const auto& row : report.f_matrix) column.push_back(row[k]);
        LinearFit fit = fit_line(d_as_double, column);
        if (report.growth_k == 0 || fit.significance > report.growth_fit.significance) {
            report.growth_fit = fit;
            report.growth_k = k;
        }
        if (fit.slope > 0.0 && fit.significance >= slope_significance) significant_growth = true;
    }

    if (score <= invariance_tol)
        report.classification = Regime::injection_limited;
    else if (significant_growth)
        report.classification = Regime::bulk_limited;
    else
        report.classification = Regime::inconclusive;

    // excursion ratios p_{d+2l}/p_d straight off the masses
    int64_t l_max = k_max / 2;
    std::vector<FptDistribution> dists;
    for (int64_t d : report.d_values) dists.push_back(fpt_exact(family.at_distance(d), k_max));
    for (int64_t l = 1; l <= l_max; ++l) {
        std::vector<double> row;
        for (const auto& dist : dists) row.push_back(dist.mass(2 * l) / dist.p_d());
        report.excursion_ratios.push_back(std::move(row));
    }
    return report;
}

const char* regime_name(Regime regime) {
    switch (regime) {
        case Regime::injection_limited: return "injection-limited";
        case Regime::bulk_limited: return "bulk-limited";
        case Regime::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

LinearFit bethe_ratio_slope(int coordination, std::span<const int64_t> d_list) {
    require(d_list.size() >= 3, errc::invalid_argument, "ratio fit needs at least 3 d values");
    std::vector<double> x, y;
    for (int64_t d : d_list) {
        FptDistribution dist = bethe_fpt(BetheSpec{coordination, d}, 2);
        x.push_back(static_cast<double>(d));
        y.push_back(dist.mass(2) / dist.p_d());
    }
    return fit_line(x, y);
}

DriftEstimate estimate_drift(const BetheSpec& spec, std::span<const int64_t> arrival_times,
                             uint64_t bootstrap_seed, int bootstrap_rounds) {
    require(arrival_times.size() >= 1000, errc::invalid_argument,
            "drift estimate needs at least 1000 conditional arrivals");
    require(bootstrap_rounds >= 2, errc::invalid_argument, "bootstrap needs at least 2 rounds");

    const double d = static_cast<double>(spec.distance);
    auto mean_of = [](std::span<const int64_t> xs) {
        double s = 0.0;
        for (int64_t x : xs) s += static_cast<double>(x);
        return s / static_cast<double>(xs.size());
    };

    DriftEstimate est;
    est.sample_count = static_cast<int64_t>(arrival_times.size());
    est.v_hat = d / mean_of(arrival_times);

    const uint32_t n = static_cast<uint32_t>(arrival_times.size());
    std::vector<double> boot(bootstrap_rounds);
    for (int round = 0; round < bootstrap_rounds; ++round) {
        RngStream rng = RngStream::keyed(bootstrap_seed, static_cast<uint64_t>(round), 0);
        double s = 0.0;
        for (uint32_t i = 0; i < n; ++i) s += static_cast<double>(arrival_times[rng.uniform_int(n)]);
        boot[round] = d / (s / n);
    }
    std::sort(boot.begin(), boot.end());
    auto pick = [&](double q) {
        size_t idx = static_cast<size_t>(q * (boot.size() - 1));
        return boot[idx];
    };
    est.ci_lo = pick(0.025);
    est.ci_hi = pick(0.975);
    return est;
}

std::vector<int64_t> sample_diffusive_reference(int64_t d, int64_t t_max, int64_t walkers,
                                                uint64_t seed) {
    require(d >= 1, errc::invalid_argument, "distance must be at least 1");
    require(t_max > d, errc::invalid_argument, "t_max must exceed the distance");
    std::vector<int64_t> arrivals;
    for (int64_t w = 0; w < walkers; ++w) {
        RngStream rng = RngStream::keyed(seed, 0, static_cast<uint64_t>(w));
        int64_t r = d;
        for (int64_t t = 1; t <= t_max; ++t) {
            r += rng.next_double() < 0.5 ? -1 : 1;
            if (r == 0) {
                arrivals.push_back(t);
                break;
            }
            if (r > t_max - t) break;  // cannot return in time
        }
    }
    return arrivals;
}

std::string regime_report_json(const RegimeReport& report) {
    nlohmann::json j;
    j["family"] = report.family;
    j["d_values"] = report.d_values;
    j["classification"] = regime_name(report.classification);
    j["invariance_score"] = report.invariance_score;
    j["invariance_tol"] = report.invariance_tol;
    j["slope_significance_threshold"] = report.slope_significance;
    j["growth_k"] = report.growth_k;
    j["growth_fit"] = {{"slope", report.growth_fit.slope},
                       {"intercept", report.growth_fit.intercept},
                       {"residual_rms", report.growth_fit.residual_rms},
                       {"slope_se", report.growth_fit.slope_se},
                       {"significance", std::isfinite(report.growth_fit.significance)
                                            ? nlohmann::json(report.growth_fit.significance)
                                            : nlohmann::json("inf")}};
    j["f_matrix"] = report.f_matrix;
    j["excursion_ratios"] = report.excursion_ratios;
    if (report.drift_estimate) j["drift_estimate"] = *report.drift_estimate;
    return j.dump(2);
}

} // namespace xfpt
