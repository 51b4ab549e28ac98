#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace xfpt {

enum class errc {
    ok = 0,
    invalid_argument,   // parameter outside its documented domain
    invalid_model,      // model spec violates a structural invariant
    horizon_exceeded,   // query beyond the distribution's computed horizon
    horizon_too_small,  // horizon insufficient for the requested precision
    divergent_mean,     // unconditional mean of a defective distribution
    nonconvergent,      // conditional asymptotics without a saturating F
    size_guard,         // enumeration size guard tripped
    underflow,          // intermediate probability underflowed to zero
    no_arrivals,        // every trial ended without an arrival
    parse_error,
    io_error,
};

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
    if (!cond) fail(code, what);
}

// Kahan-Neumaier compensated accumulator. The DP loops add many small
// probabilities to O(1) partial sums; plain summation would lose the
// low-order mass that the hard-edge invariants assert on.
class KahanSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace xfpt
