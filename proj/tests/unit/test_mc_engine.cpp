#include <doctest.h>

#include <cmath>

#include "xfpt/evt.hpp"
#include "xfpt/mc.hpp"

using namespace xfpt;

namespace {

McConfig config_of(Model model, int64_t n, int64_t trials, uint64_t seed,
                   Sampling mode = Sampling::direct_walk, int64_t t_max = 0) {
    McConfig config;
    config.model = std::move(model);
    config.n_walkers = n;
    config.trials = trials;
    config.seed = seed;
    config.mode = mode;
    config.t_max = t_max;
    return config;
}

// two-sample z comparison of empirical tails
void check_tails_close(const McResult& a, const McResult& b) {
    for (size_t k = 0; k < std::min(a.tail.size(), b.tail.size()); ++k) {
        double se = std::sqrt(a.tail_se[k] * a.tail_se[k] + b.tail_se[k] * b.tail_se[k]);
        if (se == 0.0) {
            CHECK(a.tail[k] == b.tail[k]);
        } else {
            CHECK(std::abs(a.tail[k] - b.tail[k]) <= 3.0 * se);
        }
    }
}

} // namespace

TEST_CASE("deterministic walker arrives exactly at the distance") {
    Model model = build_leaky_loop(0.0, 1.0, 5);
    for (uint64_t w = 0; w < 50; ++w) {
        RngStream rng = RngStream::keyed(1, 0, w);
        CHECK(simulate_walker(model, rng, 100) == 5);
    }
}

TEST_CASE("walker pmf matches the exact law over a million samples") {
    Model model = build_leaky_loop(0.5, 1.0, 2);
    const int64_t samples = 1000000;
    std::vector<int64_t> counts(12, 0);
    for (int64_t w = 0; w < samples; ++w) {
        RngStream rng = RngStream::keyed(99, 0, static_cast<uint64_t>(w));
        int64_t tau = simulate_walker(model, rng, 200);
        REQUIRE(tau >= 2);  // hard edge
        if (tau - 2 < static_cast<int64_t>(counts.size())) ++counts[tau - 2];
    }
    FptDistribution dist = leaky_loop_fpt(build_leaky_loop(0.5, 1.0, 2), 11);
    for (int64_t k = 0; k <= 8; ++k) {
        double expected = dist.mass(k);
        double se = std::sqrt(expected * (1.0 - expected) / samples);
        CHECK(std::abs(static_cast<double>(counts[k]) / samples - expected) <= 3.0 * se);
    }
}

TEST_CASE("bethe walker hits the shortest-path mass") {
    Model model = BetheSpec{3, 2};
    const int64_t samples = 1000000;
    int64_t hits = 0;
    for (int64_t w = 0; w < samples; ++w) {
        RngStream rng = RngStream::keyed(7, 0, static_cast<uint64_t>(w));
        if (simulate_walker(model, rng, 30) == 2) ++hits;
    }
    double expected = 1.0 / 9.0;
    double se = std::sqrt(expected * (1.0 - expected) / samples);
    CHECK(std::abs(static_cast<double>(hits) / samples - expected) <= 3.0 * se);
}

TEST_CASE("min of one walker is the walker itself") {
    Model model = build_leaky_loop(0.5, 0.9, 4);
    for (uint64_t trial = 0; trial < 200; ++trial) {
        RngStream rng = RngStream::keyed(3, trial, 0);
        int64_t solo = simulate_walker(model, rng, 50);
        int64_t min1 = sample_min_of_n(model, 1, 3, trial, 50, Sampling::direct_walk, nullptr);
        CHECK(solo == min1);
    }
}

TEST_CASE("large lambda pins the minimum at the hard edge") {
    Model model = build_leaky_loop(0.5, 1.0, 3);  // p_d = 0.5
    int64_t at_edge = 0;
    const int64_t trials = 2000;
    for (uint64_t trial = 0; trial < trials; ++trial) {
        int64_t t = sample_min_of_n(model, 64, 11, trial, 100, Sampling::direct_walk, nullptr);
        REQUIRE(t >= 3);
        if (t == 3) ++at_edge;
    }
    CHECK(at_edge == trials);  // 1 - (1 - 0.5)^64 is one within 5e-20
}

TEST_CASE("run_trials aggregates and reports") {
    McResult res = run_trials(config_of(build_leaky_loop(0.5, 0.9, 10), 20, 5000, 12345));
    CHECK(res.trials == 5000);
    CHECK(res.trials_used + res.no_arrival_count == 5000);
    CHECK(res.cond_mean >= 10.0);
    for (size_t k = 0; k + 1 < res.tail.size(); ++k) CHECK(res.tail[k] >= res.tail[k + 1]);
    CHECK(res.tail[0] <= 1.0);
    CHECK(res.tail[0] >= 0.0);
}

TEST_CASE("single trial yields a degenerate variance") {
    McResult res = run_trials(config_of(build_leaky_loop(0.0, 1.0, 4), 2, 1, 5));
    CHECK(res.trials_used == 1);
    CHECK(res.cond_mean == 4.0);
    CHECK(res.cond_var == 0.0);
}

TEST_CASE("no usable trials raises an error that carries the count") {
    McConfig config = config_of(build_leaky_loop(0.5, 0.01, 20), 2, 10, 9);
    try {
        run_trials(config);
        FAIL("expected NoArrivalsError");
    } catch (const NoArrivalsError& e) {
        CHECK(e.no_arrival_count == 10);
        CHECK(e.code() == errc::no_arrivals);
    }
}

TEST_CASE("identical seeds give byte-identical results at 1 and 8 threads") {
    for (Sampling mode : {Sampling::direct_walk, Sampling::inverse_cdf}) {
        McConfig config = config_of(build_leaky_loop(0.5, 0.9, 30), 35, 4000, 77, mode);
        config.threads = 1;
        McResult a = run_trials(config);
        config.threads = 8;
        McResult b = run_trials(config);
        CHECK(a.threads_used == 1);
        CHECK(b.threads_used == 8);
        CHECK(mc_result_json(a) == mc_result_json(b));
        CHECK(a.arrival_hist == b.arrival_hist);
    }
}

TEST_CASE("direct-walk and inverse-cdf sampling are statistically indistinguishable") {
    struct Case {
        Model model;
        int64_t n;
    };
    std::vector<Case> cases;
    cases.push_back({build_leaky_loop(0.5, 0.9, 20), 20});
    cases.push_back({CometSpec{build_clique_head(3, 0, 2), 3, 0.9}, 10});
    cases.push_back({BetheSpec{3, 4}, 50});
    for (const auto& c : cases) {
        McResult direct = run_trials(config_of(c.model, c.n, 100000, 555, Sampling::direct_walk));
        McResult inverse = run_trials(config_of(c.model, c.n, 100000, 556, Sampling::inverse_cdf));
        check_tails_close(direct, inverse);
        double se = std::hypot(direct.mean_se, inverse.mean_se);
        CHECK(std::abs(direct.cond_mean - inverse.cond_mean) <= 3.0 * se);
    }
}

TEST_CASE("no-arrival rate matches the exact defect within three sigma") {
    LeakyLoopSpec spec = build_leaky_loop(0.5, 0.9, 50);
    const int64_t trials = 50000;
    McResult res = run_trials(config_of(spec, 349, trials, 31415));
    FptDistribution dist = leaky_loop_fpt(spec, res.t_max - 50);
    double q = extreme_tail_exact({&dist, 349}, dist.k_max());  // S(t_max)^N
    double se = std::sqrt(q * (1.0 - q) / trials);
    double q_hat = static_cast<double>(res.no_arrival_count) / trials;
    CHECK(std::abs(q_hat - q) <= 3.0 * se);
    // the closed form (1 - mu^(d-1))^N is the same number at this horizon
    double q_closed = std::pow(1.0 - std::pow(0.9, 49), 349);
    CHECK(std::abs(q_hat - q_closed) <= 3.0 * se + 1e-12);
}

TEST_CASE("empirical tail tracks the exact extreme tail") {
    LeakyLoopSpec spec = build_leaky_loop(0.5, 0.9, 50);
    McResult res = run_trials(config_of(spec, 349, 50000, 424242));
    FptDistribution dist = leaky_loop_fpt(spec, 60);
    for (int64_t k = 0; k <= 15; ++k) {
        double exact = extreme_tail_exact({&dist, 349}, k);
        double se = std::sqrt(exact * (1.0 - exact) / 50000.0);
        CHECK(std::abs(res.tail[k] - exact) <= 3.0 * se);
    }
}

TEST_CASE("hard edge holds across modes and models") {
    std::vector<Model> models;
    models.push_back(build_leaky_loop(0.3, 0.9, 7));
    models.push_back(CometSpec{build_clique_head(4, 0, 3), 4, 0.8});
    models.push_back(BetheSpec{3, 3});
    for (const auto& model : models) {
        int64_t d = model_distance(model);
        for (Sampling mode : {Sampling::direct_walk, Sampling::inverse_cdf}) {
            McResult res = run_trials(config_of(model, 5, 20000, 99, mode));
            CHECK(res.hard_edge == d);
            // histogram index 0 is exactly the hard edge; the engine would have
            // thrown on anything earlier
            CHECK(res.trials_used > 0);
        }
    }
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(run_trials(config_of(build_leaky_loop(0.5, 0.9, 10), 0, 10, 1)), Error);
    CHECK_THROWS_AS(run_trials(config_of(build_leaky_loop(0.5, 0.9, 10), 1, 0, 1)), Error);
    CHECK_THROWS_AS(run_trials(config_of(build_leaky_loop(0.5, 0.9, 10), 1, 10, 1,
                                         Sampling::direct_walk, 5)),
                    Error);  // t_max below d
    CHECK_THROWS_AS(run_trials(config_of(BetheSpec{2, 4}, 1, 10, 1)), Error);
}
