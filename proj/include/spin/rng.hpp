#pragma once

#include <cstdint>
#include <cmath>
#include <utility>
#include <vector>

namespace spin {

// Counter-based deterministic generator (splitmix64 over seed ^ counter).
// Every source of randomness in a run derives from one seed through this,
// so results are reproducible across platforms and thread counts.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), counter_(0) {}

    // Independent stream for a sub-task (fold, repeat, trial, ...).
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        return Rng(mix(mix(seed) ^ (stream + 0x9e3779b97f4a7c15ULL)));
    }

    std::uint64_t next_u64() { return mix(seed_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    // [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n), n >= 1.
    std::uint64_t next_below(std::uint64_t n) {
        // 128-bit multiply rejection (Lemire)
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            std::uint64_t t = (0 - n) % n;
            while (lo < t) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    double normal() {
        // Box-Muller, one value per call (the sibling is discarded)
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t seed_;
    std::uint64_t counter_;
};

} // namespace spin
