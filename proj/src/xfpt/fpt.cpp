#include "xfpt/fpt.hpp"

#include <cmath>
#include <sstream>

namespace xfpt {

ExitPmf exit_time_pmf(const HeadGraph& head, int64_t n_max) {
    require(n_max >= 1, errc::invalid_argument, "n_max must be at least 1");
    auto violations = head.validate();
    require(violations.empty(), errc::invalid_model,
            violations.empty() ? "" : "invalid head: " + violations.front());

    const int m = head.node_count();
    std::vector<double> occupancy(m, 0.0);
    occupancy[head.start()] = 1.0;

    ExitPmf out;
    out.pmf.resize(n_max, 0.0);
    out.head_distance = head.exit_hops() + 1;

    std::vector<double> next(m, 0.0);
    for (int64_t n = 1; n <= n_max; ++n) {
        out.pmf[n - 1] = occupancy[head.exit_node()] * head.tail_prob(head.exit_node());
        std::fill(next.begin(), next.end(), 0.0);
        for (int u = 0; u < m; ++u) {
            double mass = occupancy[u];
            if (mass == 0.0) continue;
            double stay = head.loop_weight(u);
            if (stay > 0.0) next[u] += mass * stay;
            double per_edge = (1.0 - stay) / head.incident_count(u);
            for (int v : head.neighbors(u)) next[v] += mass * per_edge;
            // the tail share of the exit node leaves the head entirely
        }
        occupancy.swap(next);
    }

    KahanSum alive;
    for (double x : occupancy) alive.add(x);
    out.remaining = alive.value();
    return out;
}

FptDistribution::FptDistribution(int64_t hard_edge,
                                 std::vector<double> masses,
                                 double defect,
                                 double residual_bound,
                                 bool defect_exact)
    : hard_edge_(hard_edge),
      masses_(std::move(masses)),
      defect_(defect),
      residual_bound_(residual_bound),
      defect_exact_(defect_exact) {
    require(!masses_.empty(), errc::invalid_argument, "distribution needs at least one mass");
    require(masses_[0] > 0.0, errc::underflow,
            "shortest-path probability underflowed to zero; instance out of double range");
    cum_.resize(masses_.size());
    KahanSum acc;
    for (size_t i = 0; i < masses_.size(); ++i) {
        require(masses_[i] >= 0.0, errc::invalid_argument, "negative probability mass");
        acc.add(masses_[i]);
        cum_[i] = acc.value();
    }
}

double FptDistribution::mass(int64_t k) const {
    require(k >= 0 && k <= k_max(), errc::horizon_exceeded, "mass index beyond horizon");
    return masses_[k];
}

double FptDistribution::cumulative(int64_t k) const {
    require(k >= 0 && k <= k_max(), errc::horizon_exceeded, "cumulative index beyond horizon");
    return cum_[k];
}

double FptDistribution::survival(int64_t t) const {
    if (t < hard_edge_) return 1.0;
    int64_t k = t - hard_edge_;
    require(k <= k_max(), errc::horizon_exceeded, "survival query beyond horizon");
    return 1.0 - cum_[k];
}

FptDistribution comet_fpt(const CometSpec& spec, int64_t k_max) {
    require(k_max >= 0, errc::invalid_argument, "k_max must be nonnegative");
    require_valid(Model(spec));

    const int64_t d_head = spec.head_distance();
    ExitPmf exit = exit_time_pmf(spec.head, d_head + k_max);

    const double tail_survival = std::pow(spec.survival, static_cast<double>(spec.tail_hops));
    require(tail_survival > 0.0, errc::underflow, "tail survival underflowed to zero");

    std::vector<double> masses(k_max + 1, 0.0);
    for (int64_t k = 0; k <= k_max; ++k) masses[k] = exit.at(d_head + k) * tail_survival;

    const double defect = 1.0 - tail_survival;
    const double residual = tail_survival * exit.remaining;
    return FptDistribution(spec.distance(), std::move(masses), defect, residual, true);
}

FptDistribution leaky_loop_fpt(const LeakyLoopSpec& spec, int64_t k_max) {
    require(k_max >= 0, errc::invalid_argument, "k_max must be nonnegative");
    require_valid(Model(spec));

    const double arrive = std::pow(spec.survival, static_cast<double>(spec.distance - 1));
    require(arrive > 0.0, errc::underflow, "tail survival underflowed to zero");

    std::vector<double> masses(k_max + 1);
    masses[0] = (1.0 - spec.stay) * arrive;
    for (int64_t k = 1; k <= k_max; ++k) masses[k] = masses[k - 1] * spec.stay;

    const double defect = 1.0 - arrive;
    const double residual = arrive * std::pow(spec.stay, static_cast<double>(k_max + 1));
    return FptDistribution(spec.distance, std::move(masses), defect, residual, true);
}

FptDistribution bethe_fpt(const BetheSpec& spec, int64_t k_max) {
    require(k_max >= 0, errc::invalid_argument, "k_max must be nonnegative");
    require_valid(Model(spec));

    const int64_t d = spec.distance;
    const double z = spec.coordination;
    const double toward = 1.0 / z;
    const double away = (z - 1.0) / z;

    // Distance states 1..r_cap; absorption at 0. Mass pushed above r_cap
    // cannot reach the target within the horizon and is dropped.
    const int64_t r_cap = d + k_max + 1;
    std::vector<double> occ(r_cap + 1, 0.0), next(r_cap + 1, 0.0);
    occ[d] = 1.0;

    std::vector<double> masses(k_max + 1, 0.0);
    const int64_t horizon = d + k_max;
    for (int64_t t = 1; t <= horizon; ++t) {
        std::fill(next.begin(), next.end(), 0.0);
        double absorbed = occ[1] * toward;
        for (int64_t r = 1; r <= r_cap; ++r) {
            double mass = occ[r];
            if (mass == 0.0) continue;
            if (r > 1) next[r - 1] += mass * toward;
            if (r + 1 <= r_cap) next[r + 1] += mass * away;
        }
        if (t >= d) masses[t - d] = absorbed;
        occ.swap(next);
    }

    // Gambler's-ruin total: the chain ever hits 0 with probability (z-1)^(-d).
    const double hit_total = std::pow(1.0 / (z - 1.0), static_cast<double>(d));
    KahanSum in_horizon;
    for (double p : masses) in_horizon.add(p);
    const double residual = std::max(0.0, hit_total - in_horizon.value());
    const double defect = 1.0 - hit_total;
    return FptDistribution(d, std::move(masses), defect, residual, true);
}

FptDistribution fpt_exact(const Model& model, int64_t k_max) {
    return std::visit(
        [&](const auto& spec) {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, CometSpec>)
                return comet_fpt(spec, k_max);
            else if constexpr (std::is_same_v<T, LeakyLoopSpec>)
                return leaky_loop_fpt(spec, k_max);
            else
                return bethe_fpt(spec, k_max);
        },
        model);
}

} // namespace xfpt
