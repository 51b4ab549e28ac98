#include <doctest.h>

#include <cmath>
#include <vector>

#include "xfpt/evt.hpp"
#include "xfpt/fpt.hpp"
#include "xfpt/rng.hpp"

using namespace xfpt;

namespace {

FptDistribution reference_dist(int64_t k_max = 200) {
    return leaky_loop_fpt(build_leaky_loop(0.5, 0.9, 50), k_max);
}

// random defective distribution for property checks
FptDistribution random_dist(RngStream& rng) {
    int64_t k_max = 1 + static_cast<int64_t>(rng.uniform_int(30));
    std::vector<double> masses(k_max + 1);
    double budget = 0.05 + 0.9 * rng.next_double();
    double total = 0.0;
    for (auto& m : masses) {
        m = rng.next_double();
        total += m;
    }
    for (auto& m : masses) m *= budget / total;
    if (masses[0] <= 0.0) masses[0] = budget / (2.0 * masses.size());
    double leftover = 1.0 - budget;
    double residual = leftover * rng.next_double();
    return FptDistribution(1 + rng.uniform_int(40), std::move(masses), leftover - residual,
                           residual, true);
}

} // namespace

TEST_CASE("exact tail: single walker recovers the survival function") {
    FptDistribution dist = reference_dist();
    ExtremeQuery q{&dist, 1};
    for (int64_t k = 0; k <= 20; ++k)
        CHECK(extreme_tail_exact(q, k) == doctest::Approx(dist.survival(50 + k)).epsilon(1e-14));
}

TEST_CASE("exact tail: hard edge gives probability one below the distance") {
    FptDistribution dist = reference_dist();
    ExtremeQuery q{&dist, 349};
    CHECK(extreme_tail_exact(q, -1) == 1.0);
    CHECK(extreme_tail_exact(q, -50) == 1.0);
    CHECK_THROWS_AS(extreme_tail_exact(q, -51), Error);
    CHECK_THROWS_AS(extreme_tail_exact(q, dist.k_max() + 1), Error);
}

TEST_CASE("exact tail at lambda = 1 sits near 1/e") {
    FptDistribution dist = reference_dist();
    CHECK(n_for_lambda(dist, 1.0) == 349);
    ExtremeQuery q{&dist, 349};
    CHECK(std::abs(extreme_tail_exact(q, 0) - std::exp(-1.0)) < 2e-3);
}

TEST_CASE("hit probability") {
    FptDistribution dist = reference_dist();
    SUBCASE("single walker recovers p_d") {
        CHECK(extreme_hit_prob({&dist, 1}) == doctest::Approx(dist.p_d()).epsilon(1e-12));
    }
    SUBCASE("lambda = 1 approaches 1 - 1/e") {
        CHECK(std::abs(extreme_hit_prob({&dist, 349}) - (1.0 - std::exp(-1.0))) < 2e-3);
    }
    SUBCASE("certain shortest path hits at once") {
        FptDistribution sure = leaky_loop_fpt(build_leaky_loop(0.0, 1.0, 3), 2);
        CHECK(extreme_hit_prob({&sure, 1}) == 1.0);
        CHECK(extreme_hit_prob({&sure, 12345}) == 1.0);
    }
    SUBCASE("identity against the tail, exactly") {
        for (int64_t n : {1, 7, 349, 100000}) {
            ExtremeQuery q{&dist, n};
            CHECK(extreme_hit_prob(q) == 1.0 - extreme_tail_exact(q, 0));
        }
    }
}

TEST_CASE("property: exact tail is monotone in k and in N") {
    RngStream rng = RngStream::keyed(42, 0, 0);
    for (int round = 0; round < 200; ++round) {
        FptDistribution dist = random_dist(rng);
        int64_t n = 1 + rng.uniform_int(1000);
        double prev = 1.0;
        for (int64_t k = 0; k <= dist.k_max(); ++k) {
            double tail_n = extreme_tail_exact({&dist, n}, k);
            double tail_2n = extreme_tail_exact({&dist, 2 * n}, k);
            CHECK(tail_n <= prev + 1e-15);
            CHECK(tail_2n <= tail_n + 1e-15);
            prev = tail_n;
        }
    }
}

TEST_CASE("exact mean: deterministic model collapses onto the distance") {
    FptDistribution dist = leaky_loop_fpt(build_leaky_loop(0.0, 1.0, 7), 10);
    for (int64_t n : {1, 5, 500}) {
        CHECK(mean_exact({&dist, n}, MeanMode::unconditional).value == 7.0);
        CHECK(mean_exact({&dist, n}, MeanMode::conditional).value == doctest::Approx(7.0));
    }
}

TEST_CASE("exact mean: geometric tail sums to d + s/(1-s) for one walker") {
    FptDistribution dist = leaky_loop_fpt(build_leaky_loop(0.5, 1.0, 2), 80);
    CHECK(mean_exact({&dist, 1}, MeanMode::unconditional).value == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(mean_exact({&dist, 1}, MeanMode::conditional).value == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("exact mean: defective law rejects the unconditional mode") {
    FptDistribution dist = reference_dist();
    CHECK_THROWS_AS(mean_exact({&dist, 349}, MeanMode::unconditional), Error);
    CHECK(mean_exact({&dist, 349}, MeanMode::conditional).value > 50.0);
}

TEST_CASE("exact mean: undecayed horizon is reported, not silently truncated") {
    FptDistribution slow = leaky_loop_fpt(build_leaky_loop(0.999, 1.0, 2), 10);
    CHECK_THROWS_AS(mean_exact({&slow, 1}, MeanMode::unconditional), Error);
}

TEST_CASE("exact moments: telescoped sum equals the pmf-weighted expectation") {
    FptDistribution dist = leaky_loop_fpt(build_leaky_loop(0.5, 0.9, 6), 120);
    for (int64_t n : {1, 3, 20}) {
        ExtremeQuery q{&dist, n};
        // direct expectation over the min-of-N pmf, conditioned on arrival
        double q_inf = extreme_tail_exact(q, dist.k_max());
        double denom = 1.0 - q_inf;
        for (int order : {1, 2}) {
            double direct = 0.0;
            double prev_tail = 1.0;
            for (int64_t k = 0; k <= dist.k_max(); ++k) {
                double tail = extreme_tail_exact(q, k);
                direct += std::pow(static_cast<double>(k), order) * (prev_tail - tail) / denom;
                prev_tail = tail;
            }
            double telescoped = moment_exact(q, order, MeanMode::conditional).value;
            CHECK(telescoped == doctest::Approx(direct).epsilon(1e-10));
        }
    }
}

TEST_CASE("entropic profile from masses") {
    SUBCASE("F(0) is exactly one") {
        EntropicProfile p = profile_from_pmf(reference_dist(), 10);
        CHECK(p.f[0] == 1.0);
    }
    SUBCASE("leaky loop values") {
        EntropicProfile p = profile_from_pmf(reference_dist(), 10);
        CHECK(p.f[1] == doctest::Approx(1.5).epsilon(1e-15));
        CHECK(p.f[2] == doctest::Approx(1.75).epsilon(1e-15));
        CHECK(p.f_infinity == doctest::Approx(2.0).epsilon(1e-13));
    }
    SUBCASE("bethe lattice at depth two") {
        EntropicProfile p = profile_from_pmf(bethe_fpt(BetheSpec{3, 2}, 4), 2);
        CHECK(p.f[2] == doctest::Approx(1.0 + 4.0 / 9.0).epsilon(1e-14));
    }
    SUBCASE("matches the closed form for any depth and tail survival") {
        for (int64_t d : {2, 10, 50}) {
            for (double mu : {1.0, 0.9, 0.6}) {
                FptDistribution dist = leaky_loop_fpt(build_leaky_loop(0.5, mu, d), 50);
                EntropicProfile p = profile_from_pmf(dist, 50);
                for (int64_t k = 0; k <= 50; ++k)
                    CHECK(std::abs(p.f[k] - f_leaky_closed(0.5, k)) <= 1e-14);
            }
        }
    }
}

TEST_CASE("closed-form F") {
    CHECK(f_leaky_closed(0.0, 0) == 1.0);
    CHECK(f_leaky_closed(0.0, 9) == 1.0);
    CHECK(f_leaky_closed(0.5, 3) == doctest::Approx(1.875).epsilon(1e-15));
    CHECK(profile_leaky_closed(0.5, 5).f_infinity == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(f_leaky_closed(0.5, 60) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(f_leaky_closed(1.0, 3), Error);
}

TEST_CASE("asymptotic tail") {
    EntropicProfile p = profile_leaky_closed(0.5, 60);
    CHECK(tail_asymptotic(1.0, p, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(tail_asymptotic(1.0, p, 60) == doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
    CHECK(tail_asymptotic(200.0, p, 3) < 1e-80);
    CHECK_THROWS_AS(tail_asymptotic(0.0, p, 0), Error);
    CHECK_THROWS_AS(tail_asymptotic(1.0, p, 61), Error);
}

TEST_CASE("asymptotic mean") {
    EntropicProfile p = profile_leaky_closed(0.5, 400);
    SUBCASE("truncated mode is the plain partial sum") {
        double manual = 10.0;
        for (int64_t k = 0; k <= 6; ++k) manual += std::exp(-1.0 * p.f[k]);
        CHECK(mean_asymptotic(10, 1.0, p, AsymMode::truncated, 6).value ==
              doctest::Approx(manual).epsilon(1e-15));
    }
    SUBCASE("conditional mode converges to a horizon-independent value") {
        double a = mean_asymptotic(50, 1.0, profile_leaky_closed(0.5, 200), AsymMode::conditional, -1)
                       .value;
        double b = mean_asymptotic(50, 1.0, profile_leaky_closed(0.5, 400), AsymMode::conditional, -1)
                       .value;
        CHECK(std::abs(a - b) <= 1e-12);
    }
    SUBCASE("large lambda pins the mean at the hard edge") {
        double mean = mean_asymptotic(50, 5.0, p, AsymMode::conditional, -1).value;
        CHECK(mean - 50.0 < 0.05);
        CHECK(mean >= 50.0);
    }
    SUBCASE("profiles without a saturation value reject conditional mode") {
        // brute-force defect is only a lower bound, so F_infinity is unknown
        FptDistribution oracle = brute_force_fpt(Model(build_leaky_loop(0.5, 0.8, 3)), 10);
        EntropicProfile p_oracle = profile_from_pmf(oracle, 5);
        CHECK(!std::isfinite(p_oracle.f_infinity));
        CHECK_THROWS_AS(mean_asymptotic(3, 1.0, p_oracle, AsymMode::conditional, -1), Error);
        CHECK(mean_asymptotic(3, 1.0, p_oracle, AsymMode::truncated, 3).value > 3.0);
    }
}

TEST_CASE("asymptotic moments") {
    EntropicProfile p = profile_leaky_closed(0.5, 400);
    SUBCASE("first moment telescopes to the mean") {
        double m1 = moment_asymptotic(1, 1.0, p, AsymMode::conditional, -1).value;
        double mean = mean_asymptotic(50, 1.0, p, AsymMode::conditional, -1).value;
        CHECK(mean == m1 + 50.0);
    }
    SUBCASE("large lambda collapses every moment") {
        for (int order : {1, 2, 3})
            CHECK(moment_asymptotic(order, 40.0, p, AsymMode::conditional, -1).value < 1e-10);
    }
    SUBCASE("second moment tracks the exact variance within ten percent") {
        FptDistribution dist = reference_dist(300);
        int64_t n = n_for_lambda(dist, 1.0);
        double var_exact = variance_exact({&dist, n}, MeanMode::conditional).value;
        double var_asym =
            variance_asymptotic(1.0, profile_leaky_closed(0.5, 40), AsymMode::conditional, -1).value;
        CHECK(std::abs(var_asym - var_exact) / var_exact < 0.10);
    }
}

TEST_CASE("walker count for a target lambda") {
    FptDistribution dist = reference_dist();
    CHECK(n_for_lambda(dist, 1.0) == 349);
    CHECK(n_for_lambda(dist, dist.p_d()) == 1);
    CHECK(n_for_lambda(bethe_fpt(BetheSpec{3, 8}, 2), 1.0) == 6561);
    CHECK_THROWS_AS(n_for_lambda(dist, 0.0), Error);
}

TEST_CASE("default truncation point grows like ln N") {
    CHECK(default_trunc_k(1) == 0);
    CHECK(default_trunc_k(5) == 2);
    CHECK(default_trunc_k(50) == 4);
    CHECK(default_trunc_k(500) == 7);
}

TEST_CASE("powers near one survive large N against tiny p_d") {
    FptDistribution dist(3, {1e-8}, 1.0 - 1e-8, 0.0, true);
    double tail = extreme_tail_exact({&dist, 10000000}, 0);
    CHECK(std::abs(tail - std::exp(-0.1)) < 2e-9);
    CHECK(extreme_hit_prob({&dist, 10000000}) == 1.0 - tail);
}

TEST_CASE("limit theorem: exact tail converges to the hard-edge exponential") {
    EntropicProfile profile = profile_leaky_closed(0.5, 20);
    double prev_sup = 1e9;
    double sup = 0.0;
    for (int64_t d : {10, 20, 40, 80}) {
        FptDistribution dist = leaky_loop_fpt(build_leaky_loop(0.5, 0.9, d), 20);
        ExtremeQuery q{&dist, n_for_lambda(dist, 1.0)};
        sup = 0.0;
        for (int64_t k = 0; k <= 20; ++k)
            sup = std::max(sup, std::abs(extreme_tail_exact(q, k) - std::exp(-profile.f[k])));
        CHECK(sup < prev_sup);
        prev_sup = sup;
    }
    CHECK(sup <= 1e-3);
}
