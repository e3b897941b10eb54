#pragma once

#include <cmath>
#include <cstdint>

namespace d3r {

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

// Deterministic random stream (xoshiro256** core with hand-rolled
// distributions). std::*_distribution is implementation-defined, so all
// sampling here is spelled out to keep results bit-identical across
// standard libraries and runs.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& s : s_) s = (x = detail::splitmix64(x));
    }

    // Derives an independent stream key from mixed-in parts.
    static uint64_t key(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
        uint64_t k = detail::splitmix64(seed);
        k = detail::splitmix64(k ^ a);
        k = detail::splitmix64(k ^ b);
        k = detail::splitmix64(k ^ c);
        return k;
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi], inclusive.
    long uniform_int(long lo, long hi) {
        const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        // Unbiased bounded draw by rejection.
        const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        uint64_t u;
        do {
            u = next_u64();
        } while (u >= limit);
        return lo + static_cast<long>(u % span);
    }

    // Standard normal via Box-Muller, caching the paired deviate.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        cached_ = r * std::sin(theta);
        has_cached_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t s_[4];
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace d3r
