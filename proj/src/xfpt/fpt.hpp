#pragma once

#include <cstdint>
#include <vector>

#include "xfpt/common.hpp"
#include "xfpt/graph.hpp"

namespace xfpt {

/**
 * First-exit law of the head: pmf of the step index of the first hop onto
 * the tail. Because the tail is unidirectional this coincides with the
 * head-traversal pmf that scales the arrival masses.
 */
struct ExitPmf {
    std::vector<double> pmf;  // pmf[i] = probability the first exit hop is step i+1
    double remaining;         // occupancy still inside the head after n_max steps
    int64_t head_distance;    // smallest n with pmf > 0 (== BFS hops to exit + 1)

    double at(int64_t n) const {  // pi_n, n >= 1
        return (n >= 1 && n <= static_cast<int64_t>(pmf.size())) ? pmf[n - 1] : 0.0;
    }
};

ExitPmf exit_time_pmf(const HeadGraph& head, int64_t n_max);

/**
 * Single-walker first-passage law with a hard edge at the graph distance d.
 * Carries the in-horizon masses p_{d+k}, the never-arrive mass (defect), and
 * the arrival mass beyond the horizon (residual_bound). For the closed-form
 * model families both defect and residual are exact, so
 * sum(masses) + residual_bound + defect == 1 up to rounding.
 */
class FptDistribution {
public:
    FptDistribution(int64_t hard_edge,
                    std::vector<double> masses,
                    double defect,
                    double residual_bound,
                    bool defect_exact);

    int64_t hard_edge() const { return hard_edge_; }
    int64_t k_max() const { return static_cast<int64_t>(masses_.size()) - 1; }
    double p_d() const { return masses_[0]; }
    double mass(int64_t k) const;                 // p_{d+k}
    double cumulative(int64_t k) const;           // sum_{j<=k} p_{d+j}
    double survival(int64_t t) const;             // S(t); 1 for t < d
    double total_mass() const { return cum_.back(); }
    double defect() const { return defect_; }
    double residual_bound() const { return residual_bound_; }
    bool defect_exact() const { return defect_exact_; }
    const std::vector<double>& masses() const { return masses_; }

private:
    int64_t hard_edge_;
    std::vector<double> masses_;
    std::vector<double> cum_;
    double defect_;
    double residual_bound_;
    bool defect_exact_;
};

// p_{d+k} = pi_{d_H+k} * mu^L; the head pmf shifted by the tail length and
// scaled by the tail survival.
FptDistribution comet_fpt(const CometSpec& spec, int64_t k_max);

// Closed form p_{d+k} = s^k (1-s) mu^(d-1).
FptDistribution leaky_loop_fpt(const LeakyLoopSpec& spec, int64_t k_max);

// Dynamic programming on the distance-to-target chain: from r >= 1 the walker
// moves to r-1 with probability 1/z and to r+1 with probability (z-1)/z.
FptDistribution bethe_fpt(const BetheSpec& spec, int64_t k_max);

// Dispatch on the model variant.
FptDistribution fpt_exact(const Model& model, int64_t k_max);

// Exhaustive trajectory enumeration; the independent cross-check for the
// solvers above. Refuses instances beyond the enumeration guard.
FptDistribution brute_force_fpt(const Model& model, int64_t t_max);

} // namespace xfpt
