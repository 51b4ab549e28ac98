#include "xfpt/mc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <thread>

#include <json.hpp>

namespace xfpt {

namespace {

// Model compiled to flat arrays for the stepping loop.
struct CompiledComet {
    int start = 0;
    int exit_node = 0;
    int64_t tail_len = 0;
    double survival = 1.0;
    std::vector<double> loop_w;
    std::vector<std::vector<int32_t>> nbrs;
    std::vector<int> incident;
};

struct Compiled {
    bool is_bethe = false;
    CompiledComet comet;
    int bethe_z = 0;
    int64_t bethe_d = 0;
    int64_t hard_edge = 0;
};

Compiled compile(const Model& model) {
    Compiled c;
    c.hard_edge = model_distance(model);
    if (const auto* bethe = std::get_if<BetheSpec>(&model)) {
        c.is_bethe = true;
        c.bethe_z = bethe->coordination;
        c.bethe_d = bethe->distance;
        return c;
    }
    CometSpec spec = std::holds_alternative<CometSpec>(model)
                         ? std::get<CometSpec>(model)
                         : std::get<LeakyLoopSpec>(model).to_comet();
    const HeadGraph& head = spec.head;
    c.comet.start = head.start();
    c.comet.exit_node = head.exit_node();
    c.comet.tail_len = spec.tail_hops;
    c.comet.survival = spec.survival;
    c.comet.loop_w.resize(head.node_count());
    c.comet.nbrs.resize(head.node_count());
    c.comet.incident.resize(head.node_count());
    for (int u = 0; u < head.node_count(); ++u) {
        c.comet.loop_w[u] = head.loop_weight(u);
        c.comet.nbrs[u].assign(head.neighbors(u).begin(), head.neighbors(u).end());
        c.comet.incident[u] = head.incident_count(u);
    }
    return c;
}

int64_t walk_comet(const CompiledComet& m, RngStream& rng, int64_t t_max) {
    int node = m.start;
    int64_t tail_pos = -1;  // -1 = still in the head
    for (int64_t t = 1; t <= t_max; ++t) {
        if (tail_pos < 0) {
            double stay = m.loop_w[node];
            if (stay > 0.0 && rng.next_double() < stay) continue;
            int inc = m.incident[node];
            int idx = inc == 1 ? 0 : static_cast<int>(rng.uniform_int(static_cast<uint32_t>(inc)));
            if (node == m.exit_node && idx == inc - 1) {
                tail_pos = 0;
                if (m.tail_len == 0) return t;
            } else {
                node = m.nbrs[node][idx];
            }
        } else {
            if (m.survival < 1.0 && rng.next_double() >= m.survival) return kNoArrival;
            ++tail_pos;
            if (tail_pos == m.tail_len) return t;
        }
    }
    return kNoArrival;
}

int64_t walk_bethe(int z, int64_t d, RngStream& rng, int64_t t_max) {
    const double toward = 1.0 / z;
    int64_t r = d;
    for (int64_t t = 1; t <= t_max; ++t) {
        if (rng.next_double() < toward) {
            if (--r == 0) return t;
        } else {
            ++r;
            if (r > t_max - t) return kNoArrival;  // can no longer arrive in time
        }
    }
    return kNoArrival;
}

int64_t walk(const Compiled& c, RngStream& rng, int64_t t_max) {
    return c.is_bethe ? walk_bethe(c.bethe_z, c.bethe_d, rng, t_max)
                      : walk_comet(c.comet, rng, t_max);
}

// Inverse transform: smallest k with u < C(k), or no arrival when u lands in
// the defect-plus-residual mass.
int64_t draw_inverse(const FptDistribution& dist, double u) {
    if (u >= dist.total_mass()) return kNoArrival;
    int64_t lo = 0, hi = dist.k_max();
    while (lo < hi) {
        int64_t mid = lo + (hi - lo) / 2;
        if (u < dist.cumulative(mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    return dist.hard_edge() + lo;
}

int64_t trial_min(const Compiled& compiled, int64_t n_walkers, uint64_t seed, uint64_t trial,
                  int64_t t_max, Sampling mode, const FptDistribution* dist) {
    const int64_t d = compiled.hard_edge;
    int64_t best = kNoArrival;
    for (int64_t w = 0; w < n_walkers; ++w) {
        RngStream rng = RngStream::keyed(seed, trial, static_cast<uint64_t>(w));
        int64_t tau;
        if (mode == Sampling::direct_walk) {
            int64_t cap = best == kNoArrival ? t_max : best - 1;
            if (cap < d) break;  // nobody can beat the current minimum
            tau = walk(compiled, rng, cap);
        } else {
            tau = draw_inverse(*dist, rng.next_double());
        }
        if (tau != kNoArrival && (best == kNoArrival || tau < best)) {
            best = tau;
            if (best == d) break;  // hard edge: no walker can arrive earlier
        }
    }
    return best;
}

} // namespace

int64_t simulate_walker(const Model& model, RngStream& rng, int64_t t_max) {
    require_valid(model);
    require(t_max >= 1, errc::invalid_argument, "t_max must be at least 1");
    Compiled c = compile(model);
    return walk(c, rng, t_max);
}

int64_t sample_min_of_n(const Model& model, int64_t n_walkers, uint64_t seed, uint64_t trial,
                        int64_t t_max, Sampling mode, const FptDistribution* dist) {
    require_valid(model);
    require(n_walkers >= 1, errc::invalid_argument, "walker count must be at least 1");
    Compiled c = compile(model);
    require(t_max > c.hard_edge, errc::invalid_argument, "t_max must exceed the graph distance");
    std::optional<FptDistribution> local;
    if (mode == Sampling::inverse_cdf && dist == nullptr) {
        local.emplace(fpt_exact(model, t_max - c.hard_edge));
        dist = &*local;
    }
    return trial_min(c, n_walkers, seed, trial, t_max, mode, dist);
}

McResult run_trials(const McConfig& config) {
    require_valid(config.model);
    require(config.trials >= 1, errc::invalid_argument, "trials must be at least 1");
    require(config.n_walkers >= 1, errc::invalid_argument, "walker count must be at least 1");

    const int64_t d = model_distance(config.model);
    const int64_t t_max = config.t_max > 0 ? config.t_max : d + 200;
    require(t_max > d, errc::invalid_argument, "t_max must exceed the graph distance");

    const auto t0 = std::chrono::steady_clock::now();

    Compiled compiled = compile(config.model);
    std::optional<FptDistribution> dist;
    if (config.mode == Sampling::inverse_cdf) dist.emplace(fpt_exact(config.model, t_max - d));
    const FptDistribution* dist_ptr = dist ? &*dist : nullptr;

    int threads = config.threads > 0 ? config.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp<int>(threads, 1, 64);
    threads = static_cast<int>(std::min<int64_t>(threads, config.trials));

    const int64_t hist_len = t_max - d + 1;
    struct Chunk {
        std::vector<uint64_t> hist;
        uint64_t no_arrival = 0;
        std::exception_ptr error;
    };
    std::vector<Chunk> chunks(threads);

    auto worker = [&](int idx, int64_t lo, int64_t hi) {
        Chunk& chunk = chunks[idx];
        try {
            chunk.hist.assign(hist_len, 0);
            for (int64_t trial = lo; trial < hi; ++trial) {
                int64_t min_arrival =
                    trial_min(compiled, config.n_walkers, config.seed,
                              static_cast<uint64_t>(trial), t_max, config.mode, dist_ptr);
                if (min_arrival == kNoArrival) {
                    ++chunk.no_arrival;
                    continue;
                }
                if (min_arrival < d)
                    throw std::logic_error("hard edge violated: sampled arrival below graph distance");
                ++chunk.hist[min_arrival - d];
            }
        } catch (...) {
            chunk.error = std::current_exception();
        }
    };

    if (threads == 1) {
        worker(0, 0, config.trials);
    } else {
        std::vector<std::thread> pool;
        const int64_t per = (config.trials + threads - 1) / threads;
        for (int i = 0; i < threads; ++i) {
            int64_t lo = i * per;
            int64_t hi = std::min<int64_t>(config.trials, lo + per);
            if (lo >= hi) break;
            pool.emplace_back(worker, i, lo, hi);
        }
        for (auto& t : pool) t.join();
    }
    for (auto& chunk : chunks)
        if (chunk.error) std::rethrow_exception(chunk.error);

    McResult result;
    result.hard_edge = d;
    result.n_walkers = config.n_walkers;
    result.trials = config.trials;
    result.t_max = t_max;
    result.seed = config.seed;
    result.mode = config.mode;
    result.threads_used = threads;
    result.arrival_hist.assign(hist_len, 0);
    for (const auto& chunk : chunks) {
        if (chunk.hist.empty()) continue;
        result.no_arrival_count += static_cast<int64_t>(chunk.no_arrival);
        for (int64_t i = 0; i < hist_len; ++i) result.arrival_hist[i] += chunk.hist[i];
    }

    uint64_t used = 0;
    double sum_k = 0.0, sum_k2 = 0.0;  // exact: integer-valued partial sums stay below 2^53
    for (int64_t k = 0; k < hist_len; ++k) {
        uint64_t count = result.arrival_hist[k];
        if (count == 0) continue;
        used += count;
        sum_k += static_cast<double>(count) * static_cast<double>(k);
        sum_k2 += static_cast<double>(count) * static_cast<double>(k) * static_cast<double>(k);
    }
    result.trials_used = static_cast<int64_t>(used);
    if (result.trials_used == 0) throw NoArrivalsError(result.no_arrival_count);

    const double n_used = static_cast<double>(used);
    const double mean_k = sum_k / n_used;
    result.cond_mean = static_cast<double>(d) + mean_k;
    result.cond_var = used >= 2 ? (sum_k2 - n_used * mean_k * mean_k) / (n_used - 1.0) : 0.0;
    if (result.cond_var < 0.0) result.cond_var = 0.0;  // rounding at degenerate samples
    result.mean_se = std::sqrt(result.cond_var / n_used);

    const int64_t tail_k = std::min<int64_t>(config.tail_k_max, hist_len - 1);
    result.tail.resize(tail_k + 1);
    result.tail_se.resize(tail_k + 1);
    uint64_t arrived_upto = 0;
    for (int64_t k = 0; k <= tail_k; ++k) {
        arrived_upto += result.arrival_hist[k];
        double p = static_cast<double>(config.trials - static_cast<int64_t>(arrived_upto)) /
                   static_cast<double>(config.trials);
        result.tail[k] = p;
        result.tail_se[k] = std::sqrt(p * (1.0 - p) / static_cast<double>(config.trials));
    }

    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

std::string mc_result_json(const McResult& result) {
    nlohmann::json j;
    j["hard_edge"] = result.hard_edge;
    j["n_walkers"] = result.n_walkers;
    j["trials"] = result.trials;
    j["trials_used"] = result.trials_used;
    j["no_arrival_count"] = result.no_arrival_count;
    j["t_max"] = result.t_max;
    j["seed"] = result.seed;
    j["sampling"] = result.mode == Sampling::direct_walk ? "direct-walk" : "inverse-cdf";
    j["conditional_mean"] = result.cond_mean;
    j["conditional_variance"] = result.cond_var;
    j["mean_se"] = result.mean_se;
    nlohmann::json tail = nlohmann::json::array();
    for (size_t k = 0; k < result.tail.size(); ++k)
        tail.push_back({{"k", k}, {"p_hat", result.tail[k]}, {"se", result.tail_se[k]}});
    j["tail"] = tail;
    size_t last = result.arrival_hist.size();
    while (last > 0 && result.arrival_hist[last - 1] == 0) --last;
    j["arrival_histogram"] = std::vector<uint64_t>(result.arrival_hist.begin(),
                                                   result.arrival_hist.begin() + last);
    return j.dump(2);
}

} // namespace xfpt
