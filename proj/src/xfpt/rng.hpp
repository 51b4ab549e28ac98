#pragma once

#include <cstdint>

namespace xfpt {

// Counter-based random stream keyed by (master seed, trial index, walker index).
// Each walker owns an independent stream, so trial scheduling and thread count
// have no effect on the numbers any walker sees. Output function is the
// SplitMix64 finalizer over a Weyl sequence.
class RngStream {
public:
    static RngStream keyed(uint64_t seed, uint64_t trial, uint64_t walker) {
        uint64_t k = mix(seed + 0x243F6A8885A308D3ULL);
        k = mix(k ^ (trial + 0x9E3779B97F4A7C15ULL));
        k = mix(k ^ (walker + 0xD1B54A32D192ED03ULL));
        return RngStream(k);
    }

    uint64_t next_u64() {
        counter_ += 0x9E3779B97F4A7C15ULL;
        return mix(key_ ^ counter_);
    }

    // Uniform in [0, 1), 53-bit mantissa.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_double() < p; }

    // Uniform integer in [0, n). Lemire multiply-shift; bias is 2^-64.
    uint32_t uniform_int(uint32_t n) {
        return static_cast<uint32_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    explicit RngStream(uint64_t key) : key_(key) {}

    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    uint64_t key_;
    uint64_t counter_ = 0;
};

} // namespace xfpt
