#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "convds/common.hpp"

namespace convds {

/// SplitMix64 (Steele/Lea/Flood). Counter-derived streams: every consumer
/// seeds a fresh generator from hash-combined integers, so draws depend only
/// on (seed, logical index), never on worker count or call order.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in (0, 1]; never 0, so log() below is safe.
    double uniform() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal pair via Box-Muller.
    std::pair<double, double> gaussian_pair() {
        double u = uniform();
        double v = uniform();
        double r = std::sqrt(-2.0 * std::log(u));
        return {r * std::cos(two_pi * v), r * std::sin(two_pi * v)};
    }

    double gaussian() { return gaussian_pair().first; }

private:
    std::uint64_t state_;
};

/// Mixes a stream index into a base seed (SplitMix64 finalizer on the
/// combined words). Used to derive independent per-item streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ULL + index * 0xbf58476d1ce4e5b9ULL));
    return g.next();
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(seed, a), b);
}

}  // namespace convds
