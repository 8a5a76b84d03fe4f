#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace wmlab::rng {

// Counter-based generation: every draw is a pure function of
// (seed, stream, counter), so parallel and serial expansion agree.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return splitmix64(splitmix64(seed ^ splitmix64(stream)) ^ (counter * 0xd1b54a32d192ed03ULL));
}

/// Uniform in [0,1) with 53 random bits.
constexpr double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return double(hash(seed, stream, counter) >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on counters 2k and 2k+1.
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t k) {
    double u1 = uniform(seed, stream, 2 * k);
    double u2 = uniform(seed, stream, 2 * k + 1);
    double r = std::sqrt(-2.0 * std::log1p(-u1));  // 1-u1 in (0,1]
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

/// Sequential convenience wrapper over the counter generator.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    std::uint64_t next_u64() { return hash(seed_, stream_, counter_++); }
    double next_uniform() { return uniform(seed_, stream_, counter_++); }
    double uniform_in(double lo, double hi) { return lo + (hi - lo) * next_uniform(); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }
    double next_normal() {
        double u1 = next_uniform();
        double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

/// Per-item seed derivation: master XOR index, then mixed.
constexpr std::uint64_t item_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ index);
}

}  // namespace wmlab::rng
