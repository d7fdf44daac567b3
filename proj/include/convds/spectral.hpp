#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "convds/common.hpp"
#include "convds/linalg.hpp"
#include "convds/parallel.hpp"
#include "convds/signal.hpp"

namespace convds {

/// The m aliased symbol values at frequency omega: node_j = a_hat((omega+j)/m).
struct NodeVector {
    double omega = 0.0;
    std::vector<cxd> nodes;

    int m() const { return static_cast<int>(nodes.size()); }
};

inline NodeVector nodes(const Kernel& kernel, int m, double omega) {
    if (m < 1) throw std::invalid_argument("nodes: m must be >= 1");
    NodeVector nv;
    nv.omega = omega;
    nv.nodes.resize(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
        nv.nodes[static_cast<std::size_t>(j)] =
            kernel.symbol((omega + static_cast<double>(j)) / static_cast<double>(m));
    return nv;
}

/// Per-frequency sampling system. Rows are grouped by spatial offset
/// c = 0..L-1 and within a group by time step s = 0..N-1; the entry in
/// column j is
///     e^{+i 2 pi c j / m} * node_j^s.
/// With x_r = F(k + r M) (the aliased bins of a period-P DFT, P = m M) the
/// rows satisfy
///     (matrix x)_{(c,s)} = m e^{-i 2 pi c omega / m} H_{c,s}(k),
/// where H_{c,s} is the length-M DFT of j -> (A^s f)(m j + c) and
/// omega = k / M. That identity fixes the sign of the phase diagonal and the
/// absence of conjugation on the nodes; see the tests for the bit-level pin.
struct StackedSystem {
    int m = 1;
    int L = 1;
    int steps = 1;  // N
    double omega = 0.0;
    Matrix matrix;  // (N*L) x m
};

inline StackedSystem build_system(const Kernel& kernel, int m, int L, int N, double omega) {
    if (m < 1 || L < 1 || L > m || N < 1)
        throw dimension_error("build_system: need m >= 1, 1 <= L <= m, N >= 1");
    NodeVector nv = nodes(kernel, m, omega);
    StackedSystem sys;
    sys.m = m;
    sys.L = L;
    sys.steps = N;
    sys.omega = omega;
    sys.matrix.resize(static_cast<Eigen::Index>(N) * L, m);
    for (int c = 0; c < L; ++c) {
        for (int j = 0; j < m; ++j) {
            const cxd phase = std::conj(
                unit_phase(static_cast<double>(c) * static_cast<double>(j) / m));
            cxd power(1.0, 0.0);
            for (int s = 0; s < N; ++s) {
                sys.matrix(static_cast<Eigen::Index>(c) * N + s, j) = phase * power;
                power *= nv.nodes[static_cast<std::size_t>(j)];
            }
        }
    }
    return sys;
}

/// Absolute clustering tolerance scaled to the node magnitudes on the grid.
inline double default_node_tolerance(const Kernel& kernel, int m, FrequencyGrid grid) {
    double max_abs = 0.0;
    for (int k = 0; k < grid.size; ++k) {
        NodeVector nv = nodes(kernel, m, grid.omega(k));
        for (const cxd& z : nv.nodes) max_abs = std::max(max_abs, std::abs(z));
    }
    return 1e-9 * (1.0 + max_abs);
}

struct MultiplicityReport {
    double tolerance = 0.0;
    int max_multiplicity = 1;
    double witness_omega = 0.0;        // grid point achieving the max
    std::vector<int> witness_cluster;  // node indices of one maximal cluster
    std::vector<std::vector<int>> cluster_sizes;  // per grid point, descending
};

namespace detail {

/// Transitive-closure clusters of nodes under |z_i - z_j| <= tol; returns the
/// cluster label of each node.
inline std::vector<int> cluster_labels(const std::vector<cxd>& z, double tol) {
    const int m = static_cast<int>(z.size());
    std::vector<int> parent(static_cast<std::size_t>(m));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](int i) {
        while (parent[static_cast<std::size_t>(i)] != i) {
            parent[static_cast<std::size_t>(i)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
            i = parent[static_cast<std::size_t>(i)];
        }
        return i;
    };
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            if (std::abs(z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)]) <= tol) {
                parent[static_cast<std::size_t>(find(i))] = find(j);
            }
        }
    }
    std::vector<int> labels(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) labels[static_cast<std::size_t>(i)] = find(i);
    return labels;
}

}  // namespace detail

inline MultiplicityReport multiplicity(const Kernel& kernel, int m, FrequencyGrid grid,
                                       double tol) {
    if (tol <= 0.0) throw std::invalid_argument("multiplicity: tol must be > 0");
    MultiplicityReport rep;
    rep.tolerance = tol;
    rep.cluster_sizes.resize(static_cast<std::size_t>(grid.size));
    for (int k = 0; k < grid.size; ++k) {
        NodeVector nv = nodes(kernel, m, grid.omega(k));
        auto labels = detail::cluster_labels(nv.nodes, tol);
        std::vector<int> sizes;
        for (int i = 0; i < m; ++i) {
            if (labels[static_cast<std::size_t>(i)] != i) continue;
            int count = 0;
            std::vector<int> members;
            for (int j = 0; j < m; ++j) {
                if (labels[static_cast<std::size_t>(j)] == i) {
                    ++count;
                    members.push_back(j);
                }
            }
            sizes.push_back(count);
            if (count > rep.max_multiplicity) {
                rep.max_multiplicity = count;
                rep.witness_omega = grid.omega(k);
                rep.witness_cluster = members;
            }
        }
        std::sort(sizes.begin(), sizes.end(), std::greater<int>());
        rep.cluster_sizes[static_cast<std::size_t>(k)] = std::move(sizes);
    }
    return rep;
}

struct SeparationReport {
    double min_separation = std::numeric_limits<double>::infinity();
    double argmin_omega = 0.0;
    int i = 0;
    int j = 0;
};

inline SeparationReport node_separation(const Kernel& kernel, int m, FrequencyGrid grid) {
    if (m < 2) throw std::invalid_argument("node_separation: m must be >= 2");
    SeparationReport rep;
    for (int k = 0; k < grid.size; ++k) {
        NodeVector nv = nodes(kernel, m, grid.omega(k));
        for (int i = 0; i < m; ++i) {
            for (int j = i + 1; j < m; ++j) {
                double d = std::abs(nv.nodes[static_cast<std::size_t>(i)] -
                                    nv.nodes[static_cast<std::size_t>(j)]);
                if (d < rep.min_separation) {
                    rep.min_separation = d;
                    rep.argmin_omega = grid.omega(k);
                    rep.i = i;
                    rep.j = j;
                }
            }
        }
    }
    return rep;
}

/// Vandermonde inverse-norm bound:
///   sqrt(m) * max_i prod_{j != i} (1 + |z_j|) / |z_j - z_i|,
/// +inf when two nodes coincide within floating-point resolution.
inline double gautschi_bound(const NodeVector& nv) {
    const int m = nv.m();
    double max_abs = 0.0;
    for (const cxd& z : nv.nodes) max_abs = std::max(max_abs, std::abs(z));
    const double coincide = 1e-12 * (1.0 + max_abs);
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
        double prod = 1.0;
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            double sep = std::abs(nv.nodes[static_cast<std::size_t>(j)] -
                                  nv.nodes[static_cast<std::size_t>(i)]);
            if (sep <= coincide) return std::numeric_limits<double>::infinity();
            prod *= (1.0 + std::abs(nv.nodes[static_cast<std::size_t>(j)])) / sep;
        }
        best = std::max(best, prod);
    }
    return std::sqrt(static_cast<double>(m)) * best;
}

/// Operator norm of the pseudo-inverse, 1 / sigma_min; +inf when the system
/// is singular to working precision.
inline double inverse_norm(const StackedSystem& sys) {
    if (sys.matrix.rows() < sys.matrix.cols())
        throw dimension_error("inverse_norm: system is under-determined");
    SigmaExtremes sig = sigma_extremes(sys.matrix);
    const double eps = std::numeric_limits<double>::epsilon();
    const double floor =
        eps * sig.max * static_cast<double>(std::max(sys.matrix.rows(), sys.matrix.cols()));
    if (sig.min <= floor) return std::numeric_limits<double>::infinity();
    return 1.0 / sig.min;
}

/// Grid maximum of the per-frequency inverse norm for the L = 1 system, a
/// lower estimate of the supremum over the full circle.
inline double sup_inverse_norm(const Kernel& kernel, int m, int N, FrequencyGrid grid,
                               int threads = 1) {
    if (N < m) throw dimension_error("sup_inverse_norm: need N >= m for L = 1");
    std::vector<double> vals(static_cast<std::size_t>(grid.size));
    parallel_for(static_cast<std::size_t>(grid.size), threads, [&](std::size_t k) {
        vals[k] = inverse_norm(build_system(kernel, m, 1, N, grid.omega(static_cast<int>(k))));
    });
    return *std::max_element(vals.begin(), vals.end());
}

struct SupRefinement {
    double value = 0.0;
    int grid = 0;              // final grid size
    double last_change = 0.0;  // |value - previous value|
    double symbol_lipschitz = 0.0;
};

/// Dyadic grid refinement until successive sups agree to rtol (or the grid
/// cap is reached). The symbol's Lipschitz constant is reported so callers
/// can judge the off-grid gap.
inline SupRefinement sup_inverse_norm_refined(const Kernel& kernel, int m, int N,
                                              int initial_grid, double rtol,
                                              int max_grid = 1 << 16, int threads = 1) {
    SupRefinement out;
    out.symbol_lipschitz = kernel.symbol_lipschitz();
    int g = std::max(initial_grid, m);
    double prev = sup_inverse_norm(kernel, m, N, FrequencyGrid(g), threads);
    out.value = prev;
    out.grid = g;
    out.last_change = std::numeric_limits<double>::infinity();
    while (2 * g <= max_grid) {
        g *= 2;
        double cur = sup_inverse_norm(kernel, m, N, FrequencyGrid(g), threads);
        out.last_change = std::abs(cur - prev);
        out.value = cur;
        out.grid = g;
        if (std::isinf(prev) && std::isinf(cur)) break;
        if (out.last_change <= rtol * std::max(1.0, std::abs(cur))) break;
        prev = cur;
    }
    return out;
}

enum class Verdict { pass, marginal, fail };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "PASS";
        case Verdict::marginal: return "MARGINAL";
        case Verdict::fail: return "FAIL";
    }
    return "?";
}

struct CompletenessReport {
    Verdict verdict = Verdict::fail;
    std::string reason;
    double witness_omega = 0.0;
    std::vector<int> colliding;  // node indices at the witness (empty if n/a)
    int max_multiplicity = 1;
    int nl = 0;
    int m = 0;
    double min_sigma_min = 0.0;
    double max_sigma_max = 0.0;
    double rank_tol = 0.0;
};

/// Necessary conditions first (N L >= m, L >= max node multiplicity), then a
/// grid sweep of the stacked system's smallest singular value. PASS needs the
/// sweep minimum to clear rank_tol * (largest singular value seen).
inline CompletenessReport completeness_check(const Kernel& kernel, int m, int L, int N,
                                             FrequencyGrid grid, double rank_tol = 1e-8,
                                             int threads = 1) {
    if (m < 1 || L < 1 || L > m || N < 1)
        throw dimension_error("completeness_check: need m >= 1, 1 <= L <= m, N >= 1");
    CompletenessReport rep;
    rep.nl = N * L;
    rep.m = m;
    rep.rank_tol = rank_tol;

    if (N * L < m) {
        rep.verdict = Verdict::fail;
        rep.reason = "NL < m (" + std::to_string(N * L) + " < " + std::to_string(m) + ")";
        return rep;
    }

    MultiplicityReport mult = multiplicity(kernel, m, grid, default_node_tolerance(kernel, m, grid));
    rep.max_multiplicity = mult.max_multiplicity;
    if (mult.max_multiplicity > L) {
        rep.verdict = Verdict::fail;
        rep.reason = "node multiplicity " + std::to_string(mult.max_multiplicity) +
                     " exceeds L = " + std::to_string(L);
        rep.witness_omega = mult.witness_omega;
        rep.colliding = mult.witness_cluster;
        return rep;
    }

    std::vector<SigmaExtremes> sig(static_cast<std::size_t>(grid.size));
    parallel_for(static_cast<std::size_t>(grid.size), threads, [&](std::size_t k) {
        sig[k] = sigma_extremes(build_system(kernel, m, L, N, grid.omega(static_cast<int>(k))).matrix);
    });
    rep.min_sigma_min = std::numeric_limits<double>::infinity();
    rep.max_sigma_max = 0.0;
    double witness = 0.0;
    for (int k = 0; k < grid.size; ++k) {
        if (sig[static_cast<std::size_t>(k)].min < rep.min_sigma_min) {
            rep.min_sigma_min = sig[static_cast<std::size_t>(k)].min;
            witness = grid.omega(k);
        }
        rep.max_sigma_max = std::max(rep.max_sigma_max, sig[static_cast<std::size_t>(k)].max);
    }
    if (rep.min_sigma_min > rank_tol * rep.max_sigma_max) {
        rep.verdict = Verdict::pass;
        rep.reason = "min singular value clears threshold";
    } else {
        rep.verdict = Verdict::marginal;
        rep.reason = "min singular value at or below threshold";
        rep.witness_omega = witness;
    }
    return rep;
}

struct DiagnosticsRow {
    double omega = 0.0;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    double gautschi = 0.0;
    int max_cluster = 1;
};

/// Per-frequency sweep backing the diagnostics report.
inline std::vector<DiagnosticsRow> spectral_diagnostics(const Kernel& kernel, int m, int L,
                                                        int N, FrequencyGrid grid,
                                                        int threads = 1) {
    const double tol = default_node_tolerance(kernel, m, grid);
    std::vector<DiagnosticsRow> rows(static_cast<std::size_t>(grid.size));
    parallel_for(static_cast<std::size_t>(grid.size), threads, [&](std::size_t k) {
        const double omega = grid.omega(static_cast<int>(k));
        DiagnosticsRow& r = rows[k];
        r.omega = omega;
        SigmaExtremes sig = sigma_extremes(build_system(kernel, m, L, N, omega).matrix);
        r.sigma_min = sig.min;
        r.sigma_max = sig.max;
        NodeVector nv = nodes(kernel, m, omega);
        r.gautschi = gautschi_bound(nv);
        auto labels = detail::cluster_labels(nv.nodes, tol);
        for (int i = 0; i < m; ++i) {
            int count = 0;
            for (int j = 0; j < m; ++j)
                if (labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(i)])
                    ++count;
            r.max_cluster = std::max(r.max_cluster, count);
        }
    });
    return rows;
}

}  // namespace convds
