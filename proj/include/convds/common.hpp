#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace convds {

using cxd = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

/// e^{-i 2 pi t}. Phase convention used by every transform in this library.
inline cxd unit_phase(double t) {
    return cxd(std::cos(two_pi * t), -std::sin(two_pi * t));
}

/// Closed integer interval [lo, hi].
struct IndexWindow {
    std::int64_t lo = 0;
    std::int64_t hi = -1;

    constexpr bool valid() const { return lo <= hi; }
    constexpr std::int64_t width() const { return valid() ? hi - lo + 1 : 0; }
    constexpr bool contains(std::int64_t n) const { return n >= lo && n <= hi; }
    constexpr bool contains(IndexWindow w) const { return lo <= w.lo && w.hi <= hi; }
};

/// Nonnegative residue of n mod m (m > 0).
inline std::int64_t imod(std::int64_t n, std::int64_t m) {
    std::int64_t r = n % m;
    return r < 0 ? r + m : r;
}

struct invalid_pattern_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct window_coverage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct regularity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct no_certificate_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace convds
