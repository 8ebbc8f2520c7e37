#pragma once

#include <cmath>
#include <cstdint>

namespace viralcm {

// Counter-style 64-bit generator (SplitMix64). One instance per worker;
// never shared across threads.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1), 53-bit resolution
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [0,n), unbiased (rejection on the top band)
    std::uint64_t next_below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // strictly positive exponential variate with the given rate
    double next_exponential(double rate) {
        for (;;) {
            double u = next_double();
            if (u > 0.0) return -std::log(u) / rate;
        }
    }

private:
    std::uint64_t state_;
};

// Replicate seed derivation: first SplitMix64 output of (master + index).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return SplitMix64(master + index).next_u64();
}

} // namespace viralcm
