#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xfpt/common.hpp"
#include "xfpt/fpt.hpp"
#include "xfpt/graph.hpp"
#include "xfpt/rng.hpp"

namespace xfpt {

// Arrival-time sentinel for walkers that are killed or outlast the horizon.
constexpr int64_t kNoArrival = -1;

enum class Sampling { direct_walk, inverse_cdf };

struct McConfig {
    Model model;
    int64_t n_walkers = 1;
    int64_t trials = 1;
    uint64_t seed = 0;
    int64_t t_max = 0;       // 0 -> d + 200
    Sampling mode = Sampling::direct_walk;
    int threads = 0;         // 0 -> hardware concurrency (XFPT_THREADS is applied by callers)
    int64_t tail_k_max = 15; // reported empirical-tail range
};

struct McResult {
    int64_t hard_edge = 0;
    int64_t n_walkers = 0;
    int64_t trials = 0;
    int64_t trials_used = 0;       // trials in which some walker arrived
    int64_t no_arrival_count = 0;
    int64_t t_max = 0;
    uint64_t seed = 0;
    Sampling mode = Sampling::direct_walk;

    std::vector<uint64_t> arrival_hist;  // counts of T_N - d, index 0..t_max-d
    std::vector<double> tail;            // P̂(T_N > d+k), k = 0..tail_k_max
    std::vector<double> tail_se;         // binomial standard errors
    double cond_mean = 0.0;              // conditional on arrival
    double cond_var = 0.0;
    double mean_se = 0.0;

    // runtime metadata; deliberately absent from the serialized form so that
    // outputs are byte-identical across thread counts and reruns
    double wall_seconds = 0.0;
    int threads_used = 1;
};

class NoArrivalsError : public Error {
public:
    explicit NoArrivalsError(int64_t count)
        : Error(errc::no_arrivals,
                "no trial produced an arrival (" + std::to_string(count) + " no-arrival trials)"),
          no_arrival_count(count) {}

    int64_t no_arrival_count;
};

// One walker stepped directly under the model rules. Returns the arrival time
// (>= d) or kNoArrival when killed or still out at t_max.
int64_t simulate_walker(const Model& model, RngStream& rng, int64_t t_max);

// T_N for one trial. Walker w draws from the stream keyed (seed, trial, w),
// so results are independent of scheduling. direct_walk steps all walkers
// with an early exit once the running minimum is unbeatable; inverse_cdf
// draws arrival times from the exact distribution (dist must cover
// k = 0..t_max-d and is required in that mode).
int64_t sample_min_of_n(const Model& model, int64_t n_walkers, uint64_t seed, uint64_t trial,
                        int64_t t_max, Sampling mode, const FptDistribution* dist);

// Aggregates trials into a McResult. Bit-identical output for identical
// (config, seed) at any thread count.
McResult run_trials(const McConfig& config);

// Engine-level JSON (no timing fields; see above).
std::string mc_result_json(const McResult& result);

} // namespace xfpt
