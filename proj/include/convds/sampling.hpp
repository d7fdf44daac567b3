#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "convds/common.hpp"
#include "convds/signal.hpp"

namespace convds {

/// Spatial sampling set: either the periodic set mZ + offsets, or an explicit
/// strictly increasing finite list observed on a window.
class SamplingPattern {
public:
    enum class Kind { periodic, explicit_set };

    /// Defaults to the full lattice Z (periodic with m = 1).
    SamplingPattern() : kind_(Kind::periodic), m_(1), offsets_{0} {}

    static SamplingPattern periodic(int m, std::vector<int> offsets) {
        if (m < 1) throw invalid_pattern_error("pattern: m must be >= 1");
        std::sort(offsets.begin(), offsets.end());
        if (offsets.empty()) throw invalid_pattern_error("pattern: empty offset set");
        for (std::size_t i = 0; i < offsets.size(); ++i) {
            if (offsets[i] < 0 || offsets[i] >= m)
                throw invalid_pattern_error("pattern: offset out of [0, m)");
            if (i > 0 && offsets[i] == offsets[i - 1])
                throw invalid_pattern_error("pattern: duplicate offset");
        }
        SamplingPattern p;
        p.kind_ = Kind::periodic;
        p.m_ = m;
        p.offsets_ = std::move(offsets);
        return p;
    }

    /// mZ + {0, ..., L-1}.
    static SamplingPattern sublattice(int m, int L) {
        if (m < 1 || L < 1 || L > m)
            throw invalid_pattern_error("sublattice: need 1 <= L <= m, got L=" +
                                        std::to_string(L) + " m=" + std::to_string(m));
        std::vector<int> offs(static_cast<std::size_t>(L));
        for (int c = 0; c < L; ++c) offs[static_cast<std::size_t>(c)] = c;
        return periodic(m, std::move(offs));
    }

    static SamplingPattern explicit_set(std::vector<std::int64_t> points, IndexWindow window) {
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (points[i] <= points[i - 1])
                throw invalid_pattern_error("pattern: explicit list must be strictly increasing");
        }
        SamplingPattern p;
        p.kind_ = Kind::explicit_set;
        p.points_ = std::move(points);
        if (!window.valid() && !p.points_.empty())
            window = {p.points_.front(), p.points_.back()};
        p.window_ = window;
        return p;
    }

    Kind kind() const { return kind_; }
    bool is_periodic() const { return kind_ == Kind::periodic; }
    int m() const { return m_; }
    const std::vector<int>& offsets() const { return offsets_; }
    const std::vector<std::int64_t>& points() const { return points_; }
    IndexWindow window() const { return window_; }

    /// Offsets are exactly {0, ..., L-1}.
    bool contiguous_offsets() const {
        if (!is_periodic()) return false;
        for (std::size_t i = 0; i < offsets_.size(); ++i)
            if (offsets_[i] != static_cast<int>(i)) return false;
        return true;
    }

    bool contains(std::int64_t n) const {
        if (kind_ == Kind::periodic) {
            return std::binary_search(offsets_.begin(), offsets_.end(),
                                      static_cast<int>(imod(n, m_)));
        }
        return std::binary_search(points_.begin(), points_.end(), n);
    }

    /// Pattern points inside the window, ascending.
    std::vector<std::int64_t> enumerate(IndexWindow w) const {
        std::vector<std::int64_t> out;
        if (!w.valid()) return out;
        if (kind_ == Kind::periodic) {
            for (std::int64_t base = w.lo - imod(w.lo, m_); base <= w.hi; base += m_) {
                for (int c : offsets_) {
                    std::int64_t n = base + c;
                    if (n >= w.lo && n <= w.hi) out.push_back(n);
                }
            }
            std::sort(out.begin(), out.end());
        } else {
            for (std::int64_t p : points_)
                if (w.contains(p)) out.push_back(p);
        }
        return out;
    }

private:
    Kind kind_ = Kind::explicit_set;
    int m_ = 1;
    std::vector<int> offsets_;
    std::vector<std::int64_t> points_;
    IndexWindow window_{0, -1};
};

/// Space-time sample block: values[s][i] = (A^s f)(lambda_i) for the
/// ascending enumeration lambda_i of pattern points inside sample_window.
struct SpaceTimeSamples {
    SamplingPattern pattern;
    int steps = 1;  // N
    std::string kernel_id;
    IndexWindow signal_window{0, -1};
    IndexWindow sample_window{0, -1};
    std::vector<std::int64_t> lambdas;
    std::vector<std::vector<cxd>> values;
};

/// Short stable identifier for a kernel (FNV-1a over the tap bytes).
inline std::string kernel_identifier(const Kernel& kernel) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto eat = [&h](const void* data, std::size_t n) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& [k, v] : kernel.taps()) {
        eat(&k, sizeof(k));
        double re = v.real(), im = v.imag();
        eat(&re, sizeof(re));
        eat(&im, sizeof(im));
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

/// Collects {A^s f(lambda) : s in [N], lambda in pattern within window}.
/// The window must contain every pattern point that can carry a nonzero
/// sample; anything less would silently bias downstream estimates.
inline SpaceTimeSamples collect(const Kernel& kernel, const Signal& f,
                                const SamplingPattern& pattern, int N, IndexWindow window) {
    if (N < 1) throw std::invalid_argument("collect: N must be >= 1");
    const std::int64_t spread = static_cast<std::int64_t>(N - 1) * kernel.radius();
    const IndexWindow needed{f.start() - spread, f.end() + spread};
    auto needed_points = pattern.enumerate(needed);
    if (!needed_points.empty() &&
        !(window.lo <= needed_points.front() && window.hi >= needed_points.back())) {
        throw window_coverage_error(
            "collect: window [" + std::to_string(window.lo) + ", " + std::to_string(window.hi) +
            "] must cover pattern points in [" + std::to_string(needed_points.front()) + ", " +
            std::to_string(needed_points.back()) + "]");
    }

    SpaceTimeSamples out;
    out.pattern = pattern;
    out.steps = N;
    out.kernel_id = kernel_identifier(kernel);
    out.signal_window = f.support();
    out.sample_window = window;
    out.lambdas = pattern.enumerate(window);
    out.values.assign(static_cast<std::size_t>(N),
                      std::vector<cxd>(out.lambdas.size(), cxd(0.0, 0.0)));

    Signal state = f;
    for (int s = 0; s < N; ++s) {
        if (s > 0) state = convolve(kernel, state);
        for (std::size_t i = 0; i < out.lambdas.size(); ++i)
            out.values[static_cast<std::size_t>(s)][i] = state.at(out.lambdas[i]);
    }
    return out;
}

/// Window statistics behind the density certificate:
///   first  = N(Lambda), the max number of pattern points in any closed
///            radius-1 interval centered at an integer;
///   second = R, where 2R is the longest run of consecutive integers in the
///            window missing the pattern (so every 2R+2 consecutive integers
///            meet it, and some 2R do not).
inline std::pair<std::int64_t, std::int64_t> gap_stats(const SamplingPattern& pattern,
                                                       IndexWindow window) {
    auto pts = pattern.enumerate(window);
    if (pts.empty()) throw std::invalid_argument("gap_stats: pattern empty on window");

    std::int64_t n_lambda = 0;
    for (std::int64_t x = window.lo; x <= window.hi; ++x) {
        std::int64_t count = 0;
        for (std::int64_t d = -1; d <= 1; ++d)
            if (x + d >= window.lo && x + d <= window.hi && pattern.contains(x + d)) ++count;
        n_lambda = std::max(n_lambda, count);
    }

    std::int64_t longest_run = 0, run = 0;
    for (std::int64_t x = window.lo; x <= window.hi; ++x) {
        if (pattern.contains(x)) {
            run = 0;
        } else {
            ++run;
            longest_run = std::max(longest_run, run);
        }
    }
    return {n_lambda, longest_run / 2};
}

struct DensityRow {
    std::int64_t l = 0;
    double upper_ratio = 0.0;  // sup over centers of |pattern in [K-l, K+l]| / (2l)
    double lower_ratio = 0.0;  // inf over centers of the same count ratio
};

struct DensityReport {
    std::vector<DensityRow> rows;
    double upper_estimate = 0.0;  // estimate of the upper Banach density
    double lower_estimate = 0.0;  // estimate of the lower Banach density
    std::int64_t n_lambda = 0;
    std::int64_t max_gap_radius = 0;
    bool exact = false;       // closed form (periodic pattern)
    bool degenerate = false;  // empty pattern
};

/// Banach density report. Periodic patterns are exact (|offsets| / m);
/// explicit patterns get finite-l estimates with centers restricted to the
/// window interior, reported per l and extrapolated from the largest l.
inline DensityReport banach_density(const SamplingPattern& pattern,
                                    std::span<const std::int64_t> l_values) {
    DensityReport rep;
    if (pattern.is_periodic()) {
        double d = static_cast<double>(pattern.offsets().size()) / pattern.m();
        rep.exact = true;
        rep.upper_estimate = rep.lower_estimate = d;
        for (std::int64_t l : l_values) rep.rows.push_back({l, d, d});
        std::int64_t m = pattern.m();
        auto [nl, r] = gap_stats(pattern, {-3 * m, 3 * m});
        rep.n_lambda = nl;
        rep.max_gap_radius = r;
        return rep;
    }

    if (pattern.points().empty()) {
        rep.degenerate = true;
        for (std::int64_t l : l_values) rep.rows.push_back({l, 0.0, 0.0});
        return rep;
    }

    const IndexWindow w = pattern.window();
    std::int64_t max_l = 0;
    for (std::int64_t l : l_values) max_l = std::max(max_l, l);
    if (w.width() < 4 * max_l)
        throw std::invalid_argument("banach_density: window must be at least 4*max(l) wide");

    const auto& pts = pattern.points();
    for (std::int64_t l : l_values) {
        if (l < 1) throw std::invalid_argument("banach_density: l values must be positive");
        std::int64_t sup_count = 0;
        std::int64_t inf_count = w.width();
        for (std::int64_t center = w.lo + l; center <= w.hi - l; ++center) {
            auto lo = std::lower_bound(pts.begin(), pts.end(), center - l);
            auto hi = std::upper_bound(pts.begin(), pts.end(), center + l);
            std::int64_t count = hi - lo;
            sup_count = std::max(sup_count, count);
            inf_count = std::min(inf_count, count);
        }
        rep.rows.push_back({l, static_cast<double>(sup_count) / (2.0 * static_cast<double>(l)),
                            static_cast<double>(inf_count) / (2.0 * static_cast<double>(l))});
    }
    rep.upper_estimate = rep.rows.back().upper_ratio;
    rep.lower_estimate = rep.rows.back().lower_ratio;
    auto [nl, r] = gap_stats(pattern, w);
    rep.n_lambda = nl;
    rep.max_gap_radius = r;
    return rep;
}

}  // namespace convds
