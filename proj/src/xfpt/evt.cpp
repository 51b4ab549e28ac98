#include "xfpt/evt.hpp"

#include <cmath>
#include <limits>

namespace xfpt {

namespace {

constexpr double kTermCutoff = 1e-15;

void check_query(const ExtremeQuery& q) {
    require(q.dist != nullptr, errc::invalid_argument, "query needs a distribution");
    require(q.n_walkers >= 1, errc::invalid_argument, "walker count must be at least 1");
}

// S^N as exp(N log1p(-c)) where c = 1 - S is the accumulated arrival mass;
// c is carried directly so S near 1 loses nothing.
double power_from_complement(double c, int64_t n) {
    if (c >= 1.0) return 0.0;
    return std::exp(static_cast<double>(n) * std::log1p(-c));
}

} // namespace

double extreme_tail_exact(const ExtremeQuery& q, int64_t k) {
    check_query(q);
    const int64_t d = q.dist->hard_edge();
    require(k >= -d, errc::invalid_argument, "time d + k must be nonnegative");
    if (k < 0) return 1.0;
    require(k <= q.dist->k_max(), errc::horizon_exceeded, "tail query beyond horizon");
    return power_from_complement(q.dist->cumulative(k), q.n_walkers);
}

double extreme_hit_prob(const ExtremeQuery& q) {
    return 1.0 - extreme_tail_exact(q, 0);
}

SumResult mean_exact(const ExtremeQuery& q, MeanMode mode) {
    SumResult m = moment_exact(q, 1, mode);
    m.value += static_cast<double>(q.dist->hard_edge());
    return m;
}

SumResult moment_exact(const ExtremeQuery& q, int order, MeanMode mode) {
    check_query(q);
    require(order >= 1, errc::invalid_argument, "moment order must be at least 1");
    const FptDistribution& dist = *q.dist;
    const int64_t k_hi = dist.k_max();

    double never = 0.0;   // P(no walker arrives within horizon) = S(d+K)^N
    double denom = 1.0;
    if (mode == MeanMode::unconditional) {
        require(dist.defect() <= 0.0, errc::divergent_mean,
                "unconditional mean diverges for a defective distribution; use the conditional mode");
    } else {
        never = power_from_complement(dist.cumulative(k_hi), q.n_walkers);
        denom = -std::expm1(static_cast<double>(q.n_walkers) * std::log1p(-dist.cumulative(k_hi)));
        require(denom > 0.0, errc::invalid_argument, "no arrival mass to condition on");
    }

    KahanSum acc;
    double term = 0.0;
    double prev_pow = 0.0;  // k^order at k = 0
    for (int64_t k = 0; k <= k_hi; ++k) {
        double tail = power_from_complement(dist.cumulative(k), q.n_walkers);
        if (mode == MeanMode::conditional) tail = (tail - never) / denom;
        double next_pow = std::pow(static_cast<double>(k + 1), order);
        term = (next_pow - prev_pow) * tail;
        prev_pow = next_pow;
        acc.add(term);
    }
    require(std::abs(term) < kTermCutoff, errc::horizon_too_small,
            "horizon too small: the survival series has not decayed below 1e-15");
    // Conditional sums terminate exactly at the horizon (the last tail is 0 by
    // construction); the horizon itself contributes at most N * residual.
    double bound = (mode == MeanMode::conditional)
                       ? static_cast<double>(q.n_walkers) * dist.residual_bound()
                       : std::abs(term);
    return {acc.value(), bound};
}

SumResult variance_exact(const ExtremeQuery& q, MeanMode mode) {
    SumResult m1 = moment_exact(q, 1, mode);
    SumResult m2 = moment_exact(q, 2, mode);
    return {m2.value - m1.value * m1.value, m2.tail_bound + 2.0 * std::abs(m1.value) * m1.tail_bound};
}

double EntropicProfile::at(int64_t k) const {
    require(k >= 0, errc::invalid_argument, "profile index must be nonnegative");
    require(k <= k_max(), errc::horizon_exceeded, "profile index beyond table");
    return f[k];
}

EntropicProfile profile_from_pmf(const FptDistribution& dist, int64_t k_max) {
    require(k_max >= 0, errc::invalid_argument, "k_max must be nonnegative");
    require(k_max <= dist.k_max(), errc::horizon_exceeded, "profile request beyond distribution horizon");
    const double p_d = dist.p_d();

    EntropicProfile profile;
    profile.source = EntropicProfile::Source::from_pmf;
    profile.f.resize(k_max + 1);
    KahanSum acc;
    for (int64_t k = 0; k <= k_max; ++k) {
        acc.add(dist.mass(k) / p_d);
        profile.f[k] = acc.value();
    }
    profile.f_infinity =
        dist.defect_exact() ? (1.0 - dist.defect()) / p_d : std::numeric_limits<double>::quiet_NaN();
    return profile;
}

double f_leaky_closed(double stay, int64_t k) {
    require(stay >= 0.0 && stay < 1.0, errc::invalid_argument, "stay probability must lie in [0,1)");
    require(k >= 0, errc::invalid_argument, "k must be nonnegative");
    if (stay == 0.0) return 1.0;
    // geometric partial sum (1 - s^(k+1)) / (1 - s)
    return -std::expm1(static_cast<double>(k + 1) * std::log(stay)) / (1.0 - stay);
}

EntropicProfile profile_leaky_closed(double stay, int64_t k_max) {
    require(stay >= 0.0 && stay < 1.0, errc::invalid_argument, "stay probability must lie in [0,1)");
    require(k_max >= 0, errc::invalid_argument, "k_max must be nonnegative");
    EntropicProfile profile;
    profile.source = EntropicProfile::Source::closed_form;
    profile.f.resize(k_max + 1);
    double s_pow = stay;  // s^(k+1)
    for (int64_t k = 0; k <= k_max; ++k) {
        profile.f[k] = (1.0 - s_pow) / (1.0 - stay);
        s_pow *= stay;
    }
    profile.f_infinity = 1.0 / (1.0 - stay);
    return profile;
}

double tail_asymptotic(double lambda, const EntropicProfile& profile, int64_t k) {
    require(lambda > 0.0, errc::invalid_argument, "lambda must be positive");
    return std::exp(-lambda * profile.at(k));
}

SumResult mean_asymptotic(int64_t hard_edge, double lambda, const EntropicProfile& profile,
                          AsymMode mode, int64_t trunc_k) {
    SumResult m = moment_asymptotic(1, lambda, profile, mode, trunc_k);
    m.value += static_cast<double>(hard_edge);
    return m;
}

SumResult moment_asymptotic(int order, double lambda, const EntropicProfile& profile, AsymMode mode,
                            int64_t trunc_k) {
    require(order >= 1, errc::invalid_argument, "moment order must be at least 1");
    require(lambda > 0.0, errc::invalid_argument, "lambda must be positive");

    int64_t k_hi;
    double plateau = 0.0;
    double denom = 1.0;
    if (mode == AsymMode::truncated) {
        require(trunc_k >= 0, errc::invalid_argument, "truncation point must be nonnegative");
        require(trunc_k <= profile.k_max(), errc::horizon_exceeded,
                "truncation beyond the profile table");
        k_hi = trunc_k;
    } else {
        require(std::isfinite(profile.f_infinity), errc::nonconvergent,
                "conditional asymptotics need a saturating F; this profile has no finite limit "
                "(bulk-limited geometry)");
        k_hi = profile.k_max();
        plateau = std::exp(-lambda * profile.f_infinity);
        denom = -std::expm1(-lambda * profile.f_infinity);
        require(denom > 0.0, errc::invalid_argument, "degenerate conditioning");
    }

    KahanSum acc;
    double term = 0.0;
    double prev_pow = 0.0;  // k^order at k = 0
    for (int64_t k = 0; k <= k_hi; ++k) {
        double tail = std::exp(-lambda * profile.f[k]);
        if (mode == AsymMode::conditional) tail = (tail - plateau) / denom;
        double next_pow = std::pow(static_cast<double>(k + 1), order);
        term = (next_pow - prev_pow) * tail;
        prev_pow = next_pow;
        acc.add(term);
    }
    // truncated mode cuts the series by definition; conditional mode reports
    // the last term as the table-truncation indicator
    double bound = (mode == AsymMode::truncated) ? 0.0 : std::abs(term);
    return {acc.value(), bound};
}

SumResult variance_asymptotic(double lambda, const EntropicProfile& profile, AsymMode mode,
                              int64_t trunc_k) {
    SumResult m1 = moment_asymptotic(1, lambda, profile, mode, trunc_k);
    SumResult m2 = moment_asymptotic(2, lambda, profile, mode, trunc_k);
    return {m2.value - m1.value * m1.value, m2.tail_bound + 2.0 * std::abs(m1.value) * m1.tail_bound};
}

int64_t default_trunc_k(int64_t n_walkers) {
    require(n_walkers >= 1, errc::invalid_argument, "walker count must be at least 1");
    return static_cast<int64_t>(std::ceil(std::log(static_cast<double>(n_walkers))));
}

int64_t n_for_lambda(const FptDistribution& dist, double lambda) {
    require(lambda > 0.0, errc::invalid_argument, "lambda must be positive");
    require(dist.p_d() > 0.0, errc::invalid_argument, "p_d must be positive");
    return std::max<int64_t>(1, std::llround(lambda / dist.p_d()));
}

} // namespace xfpt
