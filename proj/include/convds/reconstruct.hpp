#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "convds/common.hpp"
#include "convds/linalg.hpp"
#include "convds/parallel.hpp"
#include "convds/rng.hpp"
#include "convds/sampling.hpp"
#include "convds/signal.hpp"
#include "convds/spectral.hpp"

namespace convds {

/// Finite cyclic surrogate of the integer lattice: indices n in
/// [base, base + period) taken modulo the period. The period is a multiple of
/// m and the base is aligned to m, so pattern residues survive the embedding.
struct PeriodicModel {
    std::int64_t period = 1;
    std::int64_t base = 0;
    std::vector<cxd> kernel_taps;  // periodized: taps summed over k = r (mod P)

    static PeriodicModel build(const Kernel& kernel, int m, IndexWindow signal_window,
                               int N) {
        const std::int64_t spread = static_cast<std::int64_t>(N - 1) * kernel.radius();
        const std::int64_t lo = signal_window.lo - spread;
        // Base is aligned down to a multiple of m so residues mod m survive;
        // the period absorbs the alignment slack to keep the support covered.
        const std::int64_t span = signal_window.width() + 2 * spread + imod(lo, m);
        PeriodicModel model;
        model.period = ((span + m - 1) / m) * m;
        model.base = lo - imod(lo, m);
        model.kernel_taps.assign(static_cast<std::size_t>(model.period), cxd(0.0, 0.0));
        for (const auto& [k, v] : kernel.taps())
            model.kernel_taps[static_cast<std::size_t>(imod(k, model.period))] += v;
        return model;
    }

    std::int64_t wrap(std::int64_t n) const { return imod(n - base, period); }

    std::vector<cxd> embed(const Signal& f) const {
        std::vector<cxd> out(static_cast<std::size_t>(period), cxd(0.0, 0.0));
        for (std::size_t i = 0; i < f.size(); ++i)
            out[static_cast<std::size_t>(wrap(f.start() + static_cast<std::int64_t>(i)))] +=
                f.values()[i];
        return out;
    }

    std::vector<cxd> cyclic_convolve(std::span<const cxd> f) const {
        std::vector<cxd> out(static_cast<std::size_t>(period), cxd(0.0, 0.0));
        for (std::int64_t k = 0; k < period; ++k) {
            const cxd a = kernel_taps[static_cast<std::size_t>(k)];
            if (a == cxd(0.0, 0.0)) continue;
            for (std::int64_t j = 0; j < period; ++j)
                out[static_cast<std::size_t>(j)] +=
                    a * f[static_cast<std::size_t>(imod(j - k, period))];
        }
        return out;
    }
};

enum class ReconStatus { exact, least_squares, rank_deficient };

inline const char* to_string(ReconStatus s) {
    switch (s) {
        case ReconStatus::exact: return "exact";
        case ReconStatus::least_squares: return "least-squares";
        case ReconStatus::rank_deficient: return "rank-deficient";
    }
    return "?";
}

struct ReconstructionResult {
    Signal f_rec{0, {cxd(0.0, 0.0)}};
    std::vector<double> bin_residuals;
    double min_sigma_min = 0.0;
    double max_sigma_min = 0.0;
    ReconStatus status = ReconStatus::exact;
    std::vector<int> deficient_bins;
    std::int64_t period = 0;
    std::int64_t bins = 0;
};

/// Recovers the initial signal from sub-lattice space-time samples.
///
/// The samples are embedded into a periodic model of period P = m M that is
/// wide enough to keep the embedding alias-free. For every DFT bin k the
/// per-offset sample rows are transformed to H_{c,s}(k) and the stacked
/// per-frequency system is solved for the aliased spectrum (F(k + r M))_r;
/// assembling and inverting the period-P DFT yields the signal. Bins whose
/// system is rank deficient get the minimum-norm solution and are flagged
/// rather than aborting the run.
inline ReconstructionResult reconstruct(const SpaceTimeSamples& samples, const Kernel& kernel,
                                        double rank_tol = 1e-8, int threads = 1) {
    const SamplingPattern& pattern = samples.pattern;
    if (!pattern.is_periodic() || !pattern.contiguous_offsets())
        throw dimension_error("reconstruct: samples must come from a periodic pattern with "
                              "offsets 0..L-1");
    const int m = pattern.m();
    const int L = static_cast<int>(pattern.offsets().size());
    const int N = samples.steps;
    if (static_cast<std::int64_t>(N) * L < m)
        throw dimension_error("reconstruct: N*L = " + std::to_string(N * L) +
                              " < m = " + std::to_string(m));

    PeriodicModel model = PeriodicModel::build(kernel, m, samples.signal_window, N);
    const std::int64_t P = model.period;
    const std::int64_t M = P / m;

    // Per-offset subsample rows on the model: h[c][s][j] = (A^s f)(m j + c + base).
    std::vector<std::vector<std::vector<cxd>>> h(
        static_cast<std::size_t>(L),
        std::vector<std::vector<cxd>>(static_cast<std::size_t>(N),
                                      std::vector<cxd>(static_cast<std::size_t>(M),
                                                       cxd(0.0, 0.0))));
    for (std::size_t i = 0; i < samples.lambdas.size(); ++i) {
        const std::int64_t lambda = samples.lambdas[i];
        if (lambda < model.base || lambda >= model.base + P) continue;  // zero by support
        const int c = static_cast<int>(imod(lambda, m));
        const std::int64_t j = (lambda - model.base - c) / m;
        for (int s = 0; s < N; ++s)
            h[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)]
             [static_cast<std::size_t>(j)] = samples.values[static_cast<std::size_t>(s)][i];
    }

    std::vector<std::vector<std::vector<cxd>>> H(
        static_cast<std::size_t>(L), std::vector<std::vector<cxd>>(static_cast<std::size_t>(N)));
    for (int c = 0; c < L; ++c)
        for (int s = 0; s < N; ++s)
            H[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)] =
                dft(h[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)]);

    ReconstructionResult result;
    result.period = P;
    result.bins = M;
    result.bin_residuals.assign(static_cast<std::size_t>(M), 0.0);
    std::vector<double> bin_sigma_min(static_cast<std::size_t>(M), 0.0);
    std::vector<char> bin_deficient(static_cast<std::size_t>(M), 0);
    std::vector<cxd> spectrum(static_cast<std::size_t>(P), cxd(0.0, 0.0));

    parallel_for(static_cast<std::size_t>(M), threads, [&](std::size_t k) {
        const double omega = static_cast<double>(k) / static_cast<double>(M);
        StackedSystem sys = build_system(kernel, m, L, N, omega);
        Vector b(static_cast<Eigen::Index>(N) * L);
        for (int c = 0; c < L; ++c) {
            const cxd offset_phase =
                static_cast<double>(m) * unit_phase(static_cast<double>(c) * omega / m);
            for (int s = 0; s < N; ++s)
                b(static_cast<Eigen::Index>(c) * N + s) =
                    offset_phase * H[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)][k];
        }
        LstsqResult ls = lstsq_min_norm(sys.matrix, b, rank_tol);
        for (int r = 0; r < m; ++r)
            spectrum[k + static_cast<std::size_t>(r) * static_cast<std::size_t>(M)] =
                ls.solution(r);
        result.bin_residuals[k] = ls.residual;
        bin_sigma_min[k] = ls.sigma_min;
        bin_deficient[k] = ls.rank_deficient ? 1 : 0;
    });

    result.min_sigma_min = *std::min_element(bin_sigma_min.begin(), bin_sigma_min.end());
    result.max_sigma_min = *std::max_element(bin_sigma_min.begin(), bin_sigma_min.end());
    for (int k = 0; k < M; ++k)
        if (bin_deficient[static_cast<std::size_t>(k)]) result.deficient_bins.push_back(k);

    std::vector<cxd> model_values = idft(spectrum);
    std::vector<cxd> rec(static_cast<std::size_t>(samples.signal_window.width()));
    for (std::int64_t n = 0; n < samples.signal_window.width(); ++n)
        rec[static_cast<std::size_t>(n)] =
            model_values[static_cast<std::size_t>(model.wrap(samples.signal_window.lo + n))];
    result.f_rec = Signal(samples.signal_window.lo, std::move(rec));

    double samples_norm = 0.0;
    for (const auto& row : samples.values)
        for (const cxd& v : row) samples_norm += std::norm(v);
    samples_norm = std::sqrt(samples_norm);
    double total_residual = 0.0;
    for (double r : result.bin_residuals) total_residual += r * r;
    total_residual = std::sqrt(total_residual);

    if (!result.deficient_bins.empty())
        result.status = ReconStatus::rank_deficient;
    else if (total_residual <= 1e-10 * std::max(1.0, samples_norm))
        result.status = ReconStatus::exact;
    else
        result.status = ReconStatus::least_squares;
    return result;
}

struct NoiseSpec {
    enum class Mode { real_only, complex_circular };

    double sigma = 0.0;  // standard deviation per perturbed component
    std::uint64_t seed = 0;
    Mode mode = Mode::complex_circular;
};

inline const char* to_string(NoiseSpec::Mode m) {
    return m == NoiseSpec::Mode::real_only ? "real-only" : "complex-circular";
}

/// I.i.d. Gaussian perturbation of every stored sample. Each sample's draw is
/// derived from (seed, flat index) via SplitMix64, so the output does not
/// depend on traversal or worker order. sigma = 0 returns the input bitwise.
inline SpaceTimeSamples add_noise(const SpaceTimeSamples& samples, const NoiseSpec& spec) {
    if (spec.sigma < 0.0) throw std::invalid_argument("add_noise: sigma must be >= 0");
    SpaceTimeSamples out = samples;
    if (spec.sigma == 0.0) return out;
    const std::size_t cols = samples.lambdas.size();
    for (std::size_t s = 0; s < out.values.size(); ++s) {
        for (std::size_t i = 0; i < cols; ++i) {
            SplitMix64 g(derive_seed(spec.seed, s * cols + i));
            auto [g1, g2] = g.gaussian_pair();
            if (spec.mode == NoiseSpec::Mode::real_only) {
                out.values[s][i] += cxd(spec.sigma * g1, 0.0);
            } else {
                out.values[s][i] += cxd(spec.sigma * g1, spec.sigma * g2);
            }
        }
    }
    return out;
}

struct RelativeError {
    double value = 0.0;
    bool absolute_fallback = false;  // reference signal was zero
};

/// || truth - estimate ||_2 / || truth ||_2 over the union of supports.
inline RelativeError recon_error(const Signal& truth, const Signal& estimate) {
    const std::int64_t lo = std::min(truth.start(), estimate.start());
    const std::int64_t hi = std::max(truth.end(), estimate.end());
    double diff = 0.0;
    for (std::int64_t n = lo; n <= hi; ++n) diff += std::norm(truth.at(n) - estimate.at(n));
    diff = std::sqrt(diff);
    const double ref = truth.norm();
    if (ref == 0.0) return {diff, true};
    return {diff / ref, false};
}

struct NoiseSweepRow {
    double sigma = 0.0;
    double mean_rel_err = 0.0;
    double std_rel_err = 0.0;
    int trials = 0;
};

struct NoiseSweepTable {
    std::vector<NoiseSweepRow> rows;
    double sup_inverse_norm = 0.0;
};

/// Mean/spread of the reconstruction error across noise realizations, one row
/// per sigma. Trial seeds are derived from (seed, sigma index, trial), so the
/// table is reproducible from the recorded seed alone. The context column
/// carries sup ||inverse system|| for the L = 1, N = max(N, m) setting.
inline NoiseSweepTable noise_sweep(const Kernel& kernel, int m, int L, int N, const Signal& f,
                                   std::span<const double> sigmas, int trials,
                                   std::uint64_t seed,
                                   NoiseSpec::Mode mode = NoiseSpec::Mode::complex_circular,
                                   int sup_grid = 512, int threads = 1) {
    if (trials < 1) throw std::invalid_argument("noise_sweep: trials must be >= 1");
    SamplingPattern pattern = SamplingPattern::sublattice(m, L);
    const std::int64_t spread = static_cast<std::int64_t>(N - 1) * kernel.radius();
    IndexWindow window{f.start() - spread, f.end() + spread};
    SpaceTimeSamples clean = collect(kernel, f, pattern, N, window);

    NoiseSweepTable table;
    table.sup_inverse_norm =
        sup_inverse_norm(kernel, m, std::max(N, m), FrequencyGrid(sup_grid), threads);
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
        std::vector<double> errs(static_cast<std::size_t>(trials));
        parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
            NoiseSpec spec{sigmas[si], derive_seed(seed, si, t), mode};
            ReconstructionResult rec = reconstruct(add_noise(clean, spec), kernel);
            errs[t] = recon_error(f, rec.f_rec).value;
        });
        double mean = 0.0;
        for (double e : errs) mean += e;
        mean /= static_cast<double>(trials);
        double var = 0.0;
        for (double e : errs) var += (e - mean) * (e - mean);
        double stddev = trials > 1 ? std::sqrt(var / static_cast<double>(trials - 1)) : 0.0;
        table.rows.push_back({sigmas[si], mean, stddev, trials});
    }
    return table;
}

}  // namespace convds
