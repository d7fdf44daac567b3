#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "convds/common.hpp"

namespace convds {

/// Finitely supported convolution kernel a on the integer lattice, stored as
/// sorted (offset, amplitude) taps. Exact zeros are dropped so that radius()
/// reflects the true support. The symbol is
///   a_hat(omega) = sum_k a(k) e^{-i 2 pi k omega},
/// 1-periodic and evaluated on demand.
class Kernel {
public:
    explicit Kernel(std::vector<std::pair<std::int64_t, cxd>> taps) {
        std::sort(taps.begin(), taps.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 0; i + 1 < taps.size(); ++i) {
            if (taps[i].first == taps[i + 1].first)
                throw std::invalid_argument("Kernel: duplicate tap offset " +
                                            std::to_string(taps[i].first));
        }
        for (auto& t : taps) {
            if (t.second != cxd(0.0, 0.0)) taps_.push_back(t);
        }
        if (taps_.empty()) throw std::invalid_argument("Kernel: no nonzero taps");
    }

    static Kernel delta() { return Kernel({{0, cxd(1.0, 0.0)}}); }

    const std::vector<std::pair<std::int64_t, cxd>>& taps() const { return taps_; }

    std::int64_t radius() const {
        std::int64_t r = 0;
        for (const auto& [k, v] : taps_) r = std::max(r, std::abs(k));
        return r;
    }

    cxd at(std::int64_t k) const {
        auto it = std::lower_bound(taps_.begin(), taps_.end(), k,
                                   [](const auto& t, std::int64_t n) { return t.first < n; });
        if (it != taps_.end() && it->first == k) return it->second;
        return cxd(0.0, 0.0);
    }

    cxd symbol(double omega) const {
        cxd acc(0.0, 0.0);
        for (const auto& [k, v] : taps_) acc += v * unit_phase(static_cast<double>(k) * omega);
        return acc;
    }

    /// d/domega of the symbol: sum_k (-i 2 pi k) a(k) e^{-i 2 pi k omega}.
    cxd symbol_derivative(double omega) const {
        cxd acc(0.0, 0.0);
        for (const auto& [k, v] : taps_) {
            acc += cxd(0.0, -two_pi * static_cast<double>(k)) * v *
                   unit_phase(static_cast<double>(k) * omega);
        }
        return acc;
    }

    /// Lipschitz constant of the symbol: 2 pi sum_k |k a(k)|.
    double symbol_lipschitz() const {
        double s = 0.0;
        for (const auto& [k, v] : taps_) s += std::abs(static_cast<double>(k)) * std::abs(v);
        return two_pi * s;
    }

    /// Lipschitz constant of the symbol derivative: (2 pi)^2 sum_k k^2 |a(k)|.
    double symbol_derivative_lipschitz() const {
        double s = 0.0;
        for (const auto& [k, v] : taps_) {
            double kk = static_cast<double>(k);
            s += kk * kk * std::abs(v);
        }
        return two_pi * two_pi * s;
    }

    bool operator==(const Kernel& other) const { return taps_ == other.taps_; }

private:
    std::vector<std::pair<std::int64_t, cxd>> taps_;
};

/// Finitely supported signal on the integer lattice: a value window starting
/// at `start`. Entries inside the window may be zero; indices outside read
/// as zero.
class Signal {
public:
    Signal(std::int64_t start, std::vector<cxd> values)
        : start_(start), values_(std::move(values)) {
        if (values_.empty()) throw std::invalid_argument("Signal: empty value window");
    }

    static Signal delta(std::int64_t at) { return Signal(at, {cxd(1.0, 0.0)}); }

    std::int64_t start() const { return start_; }
    std::int64_t end() const { return start_ + static_cast<std::int64_t>(values_.size()) - 1; }
    IndexWindow support() const { return {start(), end()}; }
    std::size_t size() const { return values_.size(); }
    const std::vector<cxd>& values() const { return values_; }

    cxd at(std::int64_t n) const {
        if (n < start_ || n > end()) return cxd(0.0, 0.0);
        return values_[static_cast<std::size_t>(n - start_)];
    }

    double norm_sq() const {
        double s = 0.0;
        for (const cxd& v : values_) s += std::norm(v);
        return s;
    }

    double norm() const { return std::sqrt(norm_sq()); }

private:
    std::int64_t start_;
    std::vector<cxd> values_;
};

/// M equispaced frequencies omega_k = k / M on [0, 1).
struct FrequencyGrid {
    int size = 1;

    explicit FrequencyGrid(int m) : size(m) {
        if (m < 1) throw std::invalid_argument("FrequencyGrid: size must be >= 1");
    }
    double omega(int k) const { return static_cast<double>(k) / static_cast<double>(size); }
};

/// (a * f)(j) = sum_k a(k) f(j - k). Output window is the exact support
/// envelope [f.start - radius, f.end + radius]; no truncation.
inline Signal convolve(const Kernel& a, const Signal& f) {
    const std::int64_t r = a.radius();
    const std::int64_t out_start = f.start() - r;
    const std::int64_t out_end = f.end() + r;
    std::vector<cxd> out(static_cast<std::size_t>(out_end - out_start + 1), cxd(0.0, 0.0));
    for (const auto& [k, v] : a.taps()) {
        const std::int64_t shift = k - out_start + f.start();
        for (std::size_t i = 0; i < f.size(); ++i) {
            out[static_cast<std::size_t>(shift + static_cast<std::int64_t>(i))] +=
                v * f.values()[i];
        }
    }
    return Signal(out_start, std::move(out));
}

/// s-fold convolution A^s f; s = 0 returns f unchanged.
inline Signal evolve(const Kernel& a, const Signal& f, int steps) {
    if (steps < 0) throw std::invalid_argument("evolve: steps must be >= 0");
    Signal g = f;
    for (int s = 0; s < steps; ++s) g = convolve(a, g);
    return g;
}

/// Half-band interpolator g(n) = sinc(n/2): g(0) = 1 and
/// g(n) = 2 sin(n pi / 2) / (n pi) elsewhere, hard-truncated at |n| = radius.
/// The discarded tail is O(1/radius) in amplitude; callers own that error.
inline Signal discrete_sinc(std::int64_t radius) {
    if (radius < 1) throw std::invalid_argument("discrete_sinc: radius must be >= 1");
    std::vector<cxd> v(static_cast<std::size_t>(2 * radius + 1), cxd(0.0, 0.0));
    v[static_cast<std::size_t>(radius)] = cxd(1.0, 0.0);
    for (std::int64_t n = 1; n <= radius; ++n) {
        double x = static_cast<double>(n);
        double g = 2.0 * std::sin(x * pi / 2.0) / (x * pi);
        v[static_cast<std::size_t>(radius + n)] = cxd(g, 0.0);
        v[static_cast<std::size_t>(radius - n)] = cxd(g, 0.0);
    }
    return Signal(-radius, std::move(v));
}

/// f_hat(omega) = sum_n f(n) e^{-i 2 pi n omega}.
inline cxd dtft_at(const Signal& f, double omega) {
    cxd acc(0.0, 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        acc += f.values()[i] *
               unit_phase(static_cast<double>(f.start() + static_cast<std::int64_t>(i)) * omega);
    }
    return acc;
}

/// Samples the transform on a frequency grid; entry k is f_hat(k / M).
inline std::vector<cxd> dtft(const Signal& f, FrequencyGrid grid) {
    std::vector<cxd> out(static_cast<std::size_t>(grid.size));
    for (int k = 0; k < grid.size; ++k) out[static_cast<std::size_t>(k)] = dtft_at(f, grid.omega(k));
    return out;
}

/// Plain O(n^2) DFT, X(k) = sum_n x(n) e^{-i 2 pi n k / N}. System sizes here
/// are small enough that transform speed never dominates a run.
inline std::vector<cxd> dft(std::span<const cxd> x) {
    const std::size_t n = x.size();
    std::vector<cxd> out(n, cxd(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        cxd acc(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            acc += x[j] * unit_phase(static_cast<double>(j) * static_cast<double>(k) /
                                     static_cast<double>(n));
        }
        out[k] = acc;
    }
    return out;
}

/// Inverse of dft(): x(n) = (1/N) sum_k X(k) e^{+i 2 pi n k / N}.
inline std::vector<cxd> idft(std::span<const cxd> x) {
    const std::size_t n = x.size();
    std::vector<cxd> out(n, cxd(0.0, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        cxd acc(0.0, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            acc += x[k] * std::conj(unit_phase(static_cast<double>(j) * static_cast<double>(k) /
                                               static_cast<double>(n)));
        }
        out[j] = acc / static_cast<double>(n);
    }
    return out;
}

}  // namespace convds
