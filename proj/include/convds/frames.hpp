#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "convds/common.hpp"
#include "convds/linalg.hpp"
#include "convds/parallel.hpp"
#include "convds/sampling.hpp"
#include "convds/signal.hpp"
#include "convds/spectral.hpp"

namespace convds {

/// Certified envelope of a real positive symbol:
///   nu <= a_hat(omega) <= mu  and  |d a_hat / d omega| <= kappa  on the circle.
/// Grid extrema are widened by a Lipschitz pad covering off-grid points, so
/// the fields are valid bounds, not estimates.
struct RegularityEnvelope {
    double nu = 0.0;
    double mu = 0.0;
    double kappa = 0.0;
    double pad = 0.0;             // Lipschitz pad applied to nu and mu
    double derivative_pad = 0.0;  // pad applied to kappa
    double grid_min = 0.0;
    double grid_max = 0.0;
    int grid = 0;
};

inline RegularityEnvelope regularity(const Kernel& kernel, FrequencyGrid grid) {
    RegularityEnvelope env;
    env.grid = grid.size;
    const double imag_tol = 1e-10;
    double min_re = std::numeric_limits<double>::infinity();
    double max_re = -std::numeric_limits<double>::infinity();
    double min_witness = 0.0;
    double max_deriv = 0.0;
    for (int k = 0; k < grid.size; ++k) {
        const double omega = grid.omega(k);
        const cxd v = kernel.symbol(omega);
        if (std::abs(v.imag()) > imag_tol)
            throw regularity_error("regularity: symbol not real at omega = " +
                                   std::to_string(omega) +
                                   " (imag = " + std::to_string(v.imag()) + ")");
        if (v.real() < min_re) {
            min_re = v.real();
            min_witness = omega;
        }
        max_re = std::max(max_re, v.real());
        max_deriv = std::max(max_deriv, std::abs(kernel.symbol_derivative(omega)));
    }
    if (min_re <= 0.0)
        throw regularity_error("regularity: symbol not positive at omega = " +
                               std::to_string(min_witness));
    const double half_step = 0.5 / static_cast<double>(grid.size);
    env.pad = kernel.symbol_lipschitz() * half_step;
    env.derivative_pad = kernel.symbol_derivative_lipschitz() * half_step;
    env.grid_min = min_re;
    env.grid_max = max_re;
    env.nu = min_re - env.pad;
    env.mu = max_re + env.pad;
    env.kappa = max_deriv + env.derivative_pad;
    if (env.nu <= 0.0)
        throw regularity_error("regularity: certified lower envelope not positive near omega = " +
                               std::to_string(min_witness) + " (grid min " +
                               std::to_string(min_re) + ", pad " + std::to_string(env.pad) + ")");
    return env;
}

/// Probe-energy constants: c_a lower-bounds sum_{s<N} |A^s g(lambda)|^2 at
/// lambda in {0, +-1}, and C_a / (1 + lambda^2) upper-bounds it everywhere,
/// for the half-band probe g. The probe's transform is twice the indicator
/// of (-1/4, 1/4), so
///   |A^s g(lambda)|           <= mu^s                       (s >= 1)
///   |lambda A^s g(lambda)|    <= 2 mu^s/pi + s mu^{s-1} kappa/(2 pi)
///   |A^s g(lambda)|           >= (2/pi) nu^s        (|lambda| <= 1)
/// and the two upper bounds combine into C_a / (1 + lambda^2) with
///   C_a = 1 + sum_{s=1}^{N-1} mu^{2s}
///           + (sum_{s=1}^{N-1} mu^{2(s-1)}) (8 mu^2/pi^2 + (N-1)^2 kappa^2/(2 pi^2)),
///   c_a = (4/pi^2) sum_{s=0}^{N-1} nu^{2s}.
/// Sums are taken term by term, so mu = 1 or nu = 1 need no special casing.
struct ProbeConstants {
    double c_a = 0.0;
    double C_a = 0.0;
    int steps = 1;  // N
};

inline ProbeConstants probe_constants(const RegularityEnvelope& env, int N) {
    if (N < 1) throw std::invalid_argument("probe_constants: N must be >= 1");
    const double nu2 = env.nu * env.nu;
    const double mu2 = env.mu * env.mu;

    double sum_nu = 0.0;  // sum_{s=0}^{N-1} nu^{2s}
    double p = 1.0;
    for (int s = 0; s < N; ++s) {
        sum_nu += p;
        p *= nu2;
    }
    const double c_a = (4.0 / (pi * pi)) * sum_nu;

    double b0 = 0.0;        // sum_{s=1}^{N-1} mu^{2s}
    double sum_mu_m1 = 0.0; // sum_{s=1}^{N-1} mu^{2(s-1)}
    double q = mu2;
    double q_m1 = 1.0;
    for (int s = 1; s < N; ++s) {
        b0 += q;
        sum_mu_m1 += q_m1;
        q *= mu2;
        q_m1 *= mu2;
    }
    const double bx = sum_mu_m1 * (8.0 * mu2 / (pi * pi) +
                                   static_cast<double>(N - 1) * static_cast<double>(N - 1) *
                                       env.kappa * env.kappa / (2.0 * pi * pi));
    ProbeConstants lc;
    lc.c_a = c_a;
    lc.C_a = 1.0 + b0 + bx;
    lc.steps = N;
    if (lc.c_a > lc.C_a) throw std::logic_error("probe_constants: c_a > C_a");
    return lc;
}

enum class FrameMethod { analytic, empirical };

inline const char* to_string(FrameMethod m) {
    return m == FrameMethod::analytic ? "analytic" : "empirical";
}

struct FrameBounds {
    double c_min = 0.0;
    double c_max = 0.0;
    FrameMethod method = FrameMethod::analytic;
    bool no_frame = false;  // lower bound degenerated to zero
    // context
    int m = 0;
    int L = 0;
    int steps = 0;
};

/// Frame constants of the m-periodic sampling system with N = m time steps,
/// from the per-frequency singular values:
///   c_min = 1 / (m sup ||inverse||^2),   c_max = sup sigma_max^2 / m,
/// suprema over the grid. The 1/m is the Jacobian of splitting the circle
/// into m aliased bands; f = delta_0 pins it (its sample energy already
/// exceeds sigma_max^2 / m^2).
inline FrameBounds analytic_frame_bounds(const Kernel& kernel, int m, FrequencyGrid grid,
                                         int threads = 1) {
    FrameBounds fb;
    fb.method = FrameMethod::analytic;
    fb.m = m;
    fb.L = 1;
    fb.steps = m;
    std::vector<SigmaExtremes> sig(static_cast<std::size_t>(grid.size));
    parallel_for(static_cast<std::size_t>(grid.size), threads, [&](std::size_t k) {
        sig[k] = sigma_extremes(
            build_system(kernel, m, 1, m, grid.omega(static_cast<int>(k))).matrix);
    });
    double sup_inv = 0.0;
    double sup_max = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (const SigmaExtremes& s : sig) {
        sup_max = std::max(sup_max, s.max);
        if (s.min <= eps * s.max * m)
            sup_inv = std::numeric_limits<double>::infinity();
        else
            sup_inv = std::max(sup_inv, 1.0 / s.min);
    }
    const double mm = static_cast<double>(m);
    fb.c_max = sup_max * sup_max / mm;
    if (std::isinf(sup_inv)) {
        fb.c_min = 0.0;
        fb.no_frame = true;
    } else {
        fb.c_min = 1.0 / (mm * sup_inv * sup_inv);
    }
    return fb;
}

/// Analysis matrix with one row per (time step, sampling point) and one
/// column per signal index: entry a^{(s)}(lambda - n).
inline Matrix analysis_matrix(const Kernel& kernel, std::span<const std::int64_t> lambdas,
                              int N, std::span<const std::int64_t> columns) {
    Matrix a = Matrix::Zero(static_cast<Eigen::Index>(N) * lambdas.size(), columns.size());
    Signal power = Signal::delta(0);  // a^{(s)} as a signal
    for (int s = 0; s < N; ++s) {
        if (s > 0) power = convolve(kernel, power);
        for (std::size_t li = 0; li < lambdas.size(); ++li) {
            const Eigen::Index row =
                static_cast<Eigen::Index>(s) * lambdas.size() + static_cast<Eigen::Index>(li);
            for (std::size_t ci = 0; ci < columns.size(); ++ci)
                a(row, static_cast<Eigen::Index>(ci)) = power.at(lambdas[li] - columns[ci]);
        }
    }
    return a;
}

/// Frame constants measured on a finite window: extreme squared singular
/// values of the analysis matrix restricted to interior signal columns.
/// Columns at distance >= interior_margin from the window edges have every
/// reachable sample row inside the window (for margins of at least
/// (N-1) * radius), so the measured range is exactly the infinite quadratic
/// form restricted to a subspace. Pass interior_margin < 0 for the default
/// (N-1) * radius + 8.
inline FrameBounds empirical_frame_bounds(const Kernel& kernel, const SamplingPattern& pattern,
                                          int N, IndexWindow window,
                                          std::int64_t interior_margin = -1) {
    if (N < 1) throw std::invalid_argument("empirical_frame_bounds: N must be >= 1");
    const std::int64_t spread = static_cast<std::int64_t>(N - 1) * kernel.radius();
    if (interior_margin < 0) interior_margin = spread + 8;
    const std::int64_t col_lo = window.lo + interior_margin;
    const std::int64_t col_hi = window.hi - interior_margin;
    if (col_lo > col_hi)
        throw window_coverage_error("empirical_frame_bounds: window too small, no interior "
                                    "columns at margin " + std::to_string(interior_margin));
    std::vector<std::int64_t> columns;
    columns.reserve(static_cast<std::size_t>(col_hi - col_lo + 1));
    for (std::int64_t n = col_lo; n <= col_hi; ++n) columns.push_back(n);
    std::vector<std::int64_t> lambdas = pattern.enumerate(window);
    if (lambdas.empty())
        throw window_coverage_error("empirical_frame_bounds: pattern empty on window");

    SigmaExtremes sig = sigma_extremes(analysis_matrix(kernel, lambdas, N, columns));
    FrameBounds fb;
    fb.method = FrameMethod::empirical;
    fb.m = pattern.is_periodic() ? pattern.m() : 0;
    fb.L = pattern.is_periodic() ? static_cast<int>(pattern.offsets().size()) : 0;
    fb.steps = N;
    fb.c_min = sig.min * sig.min;
    fb.c_max = sig.max * sig.max;
    fb.no_frame = fb.c_min == 0.0;
    return fb;
}

/// Two-sided Banach density certificate from probe constants and frame
/// bounds:
///   lower = max{ c_a c_min / (2 c_max C_a), c_min / (3 C_a) },
///   upper = min{ c_max / c_a, 3/2 }.
struct DensityCertificate {
    double lower = 0.0;
    double upper = 0.0;
    double c_a = 0.0;
    double C_a = 0.0;
    double c_min = 0.0;
    double c_max = 0.0;
};

inline DensityCertificate density_certificate(const ProbeConstants& lc, const FrameBounds& fb) {
    if (fb.c_min <= 0.0)
        throw no_certificate_error("density_certificate: lower frame bound is zero");
    DensityCertificate cert;
    cert.c_a = lc.c_a;
    cert.C_a = lc.C_a;
    cert.c_min = fb.c_min;
    cert.c_max = fb.c_max;
    cert.lower = std::max(lc.c_a * fb.c_min / (2.0 * fb.c_max * lc.C_a),
                          fb.c_min / (3.0 * lc.C_a));
    cert.upper = std::min(fb.c_max / lc.c_a, 1.5);
    return cert;
}

struct DecayPoint {
    std::int64_t dim = 0;
    double sigma_min_sq = 0.0;
};

struct DecayCurve {
    std::vector<DecayPoint> points;
    bool strictly_decreasing = true;
    double final_over_initial = 1.0;
};

/// Smallest squared singular value of the analysis matrix for a fixed finite
/// set of sampling locations, as the signal window grows. The column window
/// of each width is centered on the midpoint of the locations' visible cone
/// (sensors at lambda see f(lambda - k) after the kernel drifts by k per
/// step, so the window tracks -drift * (N-1) / 2); n_rule gives the number
/// of time steps per width (defaults to the width itself).
inline DecayCurve finite_set_decay(const Kernel& kernel, std::span<const std::int64_t> locations,
                                   std::span<const std::int64_t> dims,
                                   std::function<int(std::int64_t)> n_rule = {},
                                   int threads = 1) {
    if (locations.empty()) throw std::invalid_argument("finite_set_decay: locations empty");
    for (std::size_t i = 1; i < dims.size(); ++i)
        if (dims[i] <= dims[i - 1])
            throw std::invalid_argument("finite_set_decay: dims must be increasing");
    if (!n_rule) n_rule = [](std::int64_t dim) { return static_cast<int>(dim); };

    std::vector<std::int64_t> lambdas(locations.begin(), locations.end());
    std::sort(lambdas.begin(), lambdas.end());
    double loc_mean = 0.0;
    for (std::int64_t l : lambdas) loc_mean += static_cast<double>(l);
    loc_mean /= static_cast<double>(lambdas.size());
    const auto& taps = kernel.taps();
    const double drift =
        0.5 * static_cast<double>(taps.front().first + taps.back().first);

    DecayCurve curve;
    curve.points.resize(dims.size());
    parallel_for(dims.size(), threads, [&](std::size_t di) {
        const std::int64_t dim = dims[di];
        const int N = n_rule(dim);
        // sensors at lambda see f over lambda - [s kmin, s kmax]; the union
        // over s < N is centered at lambda - drift (N-1)
        const double center = loc_mean - drift * static_cast<double>(N - 1);
        const std::int64_t lo = std::llround(center - static_cast<double>(dim - 1) / 2.0);
        std::vector<std::int64_t> columns(static_cast<std::size_t>(dim));
        for (std::int64_t n = 0; n < dim; ++n) columns[static_cast<std::size_t>(n)] = lo + n;
        Matrix a = analysis_matrix(kernel, lambdas, N, columns);
        SigmaExtremes sig = sigma_extremes(a);
        curve.points[di] = {dim, sig.min * sig.min};
    });
    for (std::size_t i = 1; i < curve.points.size(); ++i)
        if (curve.points[i].sigma_min_sq >= curve.points[i - 1].sigma_min_sq)
            curve.strictly_decreasing = false;
    if (!curve.points.empty() && curve.points.front().sigma_min_sq > 0.0)
        curve.final_over_initial =
            curve.points.back().sigma_min_sq / curve.points.front().sigma_min_sq;
    return curve;
}

}  // namespace convds
