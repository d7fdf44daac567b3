// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured quantities.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>

#include <json.hpp>

#include "convds/convds.hpp"
#include "oracles.hpp"
#include "subprocess.hpp"

namespace fs = std::filesystem;
using namespace convds;
using Catch::Approx;

namespace {

const double phi = (1.0 + std::sqrt(5.0)) / 2.0;

Kernel half_pair() { return Kernel({{0, 0.5}, {1, 0.5}}); }
Kernel cosine_kernel() { return Kernel({{-1, 0.125}, {0, 0.75}, {1, 0.125}}); }
Kernel interleaved() { return Kernel({{-2, 0.25}, {0, 0.5}, {2, 0.25}}); }
Kernel three_tap() { return Kernel({{0, 0.5}, {1, 0.35}, {2, 0.15}}); }
Kernel transport() { return Kernel({{0, 0.003}, {1, 0.997}}); }
Kernel wide_gap() { return Kernel({{0, 0.8}, {1, 0.2}}); }

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[acceptance] criterion %d (%s): %s%s%s\n", criterion, name.c_str(),
                pass ? "PASS" : "FAIL", detail.empty() ? "" : " - ", detail.c_str());
    std::fflush(stdout);
}

SpaceTimeSamples sample(const Kernel& a, const Signal& f, int m, int L, int N) {
    const std::int64_t spread = static_cast<std::int64_t>(N - 1) * a.radius();
    return collect(a, f, SamplingPattern::sublattice(m, L), N,
                   {f.start() - spread, f.end() + spread});
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

TEST_CASE("criterion 1: frequency solve matches time-domain least squares") {
    auto t0 = std::chrono::steady_clock::now();
    double max_dev = 0.0;
    for (int m : {2, 3}) {
        Kernel a = m == 2 ? half_pair() : three_tap();
        const int N = m;
        for (std::uint64_t trial = 0; trial < 20; ++trial) {
            Signal f = oracle::random_signal(9000 + 100 * static_cast<std::uint64_t>(m) + trial,
                                             0, 100);
            SpaceTimeSamples samples = sample(a, f, m, 1, N);
            ReconstructionResult rec = reconstruct(samples, a);

            PeriodicModel model = PeriodicModel::build(a, m, samples.signal_window, N);
            const std::int64_t P = model.period;
            REQUIRE(P <= 512);
            const std::int64_t M = P / m;
            oracle::CyclicModel cyc(a, P);
            std::vector<std::vector<cxd>> powers;
            std::vector<cxd> delta(static_cast<std::size_t>(P), cxd(0.0, 0.0));
            delta[0] = cxd(1.0, 0.0);
            powers.push_back(delta);
            for (int s = 1; s < N; ++s) powers.push_back(cyc.convolve(powers.back()));

            Matrix design(static_cast<Eigen::Index>(N) * M, P);
            Vector rhs(design.rows());
            for (int s = 0; s < N; ++s)
                for (std::int64_t j = 0; j < M; ++j) {
                    Eigen::Index row = static_cast<Eigen::Index>(s) * M + j;
                    for (std::int64_t n = 0; n < P; ++n)
                        design(row, n) = powers[static_cast<std::size_t>(s)]
                                               [static_cast<std::size_t>(imod(m * j - n, P))];
                    std::int64_t lambda_abs = model.base + m * j;
                    cxd v(0.0, 0.0);
                    for (std::size_t i = 0; i < samples.lambdas.size(); ++i)
                        if (samples.lambdas[i] == lambda_abs)
                            v = samples.values[static_cast<std::size_t>(s)][i];
                    rhs(row) = v;
                }
            Vector direct = lstsq_min_norm(design, rhs, 1e-10).solution;

            double dev = 0.0;
            for (std::int64_t n = 0; n < P; ++n)
                dev = std::max(dev, std::abs(rec.f_rec.at(model.base + n) - direct(n)));
            max_dev = std::max(max_dev, dev / f.norm());
        }
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = max_dev <= 1e-8 && elapsed < 10.0;
    report(1, "oracle equivalence", pass,
           "max relative deviation " + fmt(max_dev) + ", " + fmt(elapsed) + " s");
    REQUIRE(max_dev <= 1e-8);
    REQUIRE(elapsed < 10.0);
}

TEST_CASE("criterion 2: exact recovery over 100 random trials") {
    Kernel a = half_pair();
    double worst = 0.0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        Signal f = oracle::random_signal(5000 + trial, 0, 64);
        ReconstructionResult rec = reconstruct(sample(a, f, 2, 1, 2), a);
        worst = std::max(worst, recon_error(f, rec.f_rec).value);
    }
    report(2, "exact recovery", worst <= 1e-6, "worst relative error " + fmt(worst));
    REQUIRE(worst <= 1e-6);
}

TEST_CASE("criterion 3: empirical frame bounds sandwich the analytic pair") {
    Kernel a = half_pair();
    // phi confirmed by the per-frequency singular-value sweep on 1024 points
    double sup_inv = sup_inverse_norm(a, 2, 2, FrequencyGrid(1024));
    bool phi_ok = std::abs(sup_inv - phi) <= 1e-9 * phi;

    FrameBounds ana = analytic_frame_bounds(a, 2, FrequencyGrid(1024));
    // derived pair: (1 / (2 phi^2), phi^2 / 2); the 1/m normalization is
    // pinned by direct sample energy (see ledgered deviation from the
    // printed m^-2 constants, which no frame constant of this system can meet)
    bool pair_ok = std::abs(ana.c_min - 1.0 / (2.0 * phi * phi)) <= 1e-9 &&
                   std::abs(ana.c_max - phi * phi / 2.0) <= 1e-9;

    FrameBounds emp = empirical_frame_bounds(a, SamplingPattern::sublattice(2, 1), 2,
                                             {-256, 255});
    bool sandwich = emp.c_min >= ana.c_min * 0.95 && emp.c_min <= ana.c_min * 1.05 &&
                    emp.c_max >= ana.c_max * 0.95 && emp.c_max <= ana.c_max * 1.05;
    bool pass = phi_ok && pair_ok && sandwich;
    report(3, "frame-bound sandwich", pass,
           "analytic [" + fmt(ana.c_min) + ", " + fmt(ana.c_max) + "], empirical [" +
               fmt(emp.c_min) + ", " + fmt(emp.c_max) + "], sup inverse norm " + fmt(sup_inv));
    REQUIRE(phi_ok);
    REQUIRE(pair_ok);
    REQUIRE(sandwich);
}

TEST_CASE("criterion 4: gautschi bound dominates the exact inverse norm") {
    FrequencyGrid grid(1024);
    struct Case {
        Kernel kernel;
        int m;
        const char* name;
    };
    Kernel random5 = oracle::random_kernel(3, 2);  // 5 taps
    std::vector<Case> cases;
    cases.push_back({half_pair(), 2, "two-tap"});
    cases.push_back({cosine_kernel(), 2, "cosine"});
    cases.push_back({random5, 3, "random-5-tap"});

    SeparationReport sep = node_separation(random5, 3, grid);
    bool sep_ok = sep.min_separation > 1e-2;

    bool dominated = true;
    double worst_ratio = 0.0;
    for (const Case& c : cases) {
        for (int k = 0; k < grid.size; ++k) {
            double inv = inverse_norm(build_system(c.kernel, c.m, 1, c.m, grid.omega(k)));
            double bound = gautschi_bound(nodes(c.kernel, c.m, grid.omega(k)));
            if (std::isinf(bound)) continue;  // coincident nodes: bound is +inf
            if (!(inv <= bound * (1.0 + 1e-9))) dominated = false;
            if (std::isfinite(inv)) worst_ratio = std::max(worst_ratio, inv / bound);
        }
    }
    bool pass = dominated && sep_ok;
    report(4, "gautschi dominance", pass,
           "worst inverse-norm / bound ratio " + fmt(worst_ratio) + ", random-kernel separation " +
               fmt(sep.min_separation));
    REQUIRE(sep_ok);
    REQUIRE(dominated);
}

TEST_CASE("criterion 5: necessary conditions and the rescue offset") {
    Kernel a = interleaved();
    FrequencyGrid grid(512);

    bool fails_mult = true;
    for (int N : {2, 3, 6}) {
        CompletenessReport rep = completeness_check(a, 2, 1, N, grid);
        if (rep.verdict != Verdict::fail || rep.max_multiplicity != 2) fails_mult = false;
    }
    CompletenessReport count = completeness_check(a, 2, 1, 1, grid);
    bool fails_count =
        count.verdict == Verdict::fail && count.reason.find("NL < m") != std::string::npos;

    CompletenessReport rescued = completeness_check(a, 2, 2, 1, grid);
    bool passes_l2 = rescued.verdict == Verdict::pass;

    double worst = 0.0;
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        Signal f = oracle::random_signal(7000 + trial, -10, 48);
        ReconstructionResult rec = reconstruct(sample(a, f, 2, 2, 1), a);
        worst = std::max(worst, recon_error(f, rec.f_rec).value);
    }
    bool recovered = worst <= 1e-8;
    bool pass = fails_mult && fails_count && passes_l2 && recovered;
    report(5, "sub-lattice completeness necessary conditions", pass,
           "L=1 multiplicity FAILs, N=1 count FAIL, L=2 PASS, recovery error " + fmt(worst));
    REQUIRE(fails_mult);
    REQUIRE(fails_count);
    REQUIRE(passes_l2);
    REQUIRE(recovered);
}

TEST_CASE("criterion 6: probe constants bracket the evolved probe energies") {
    Kernel a = cosine_kernel();
    RegularityEnvelope env = regularity(a, FrequencyGrid(4096));
    REQUIRE(std::abs(env.nu - 0.5) <= 2.0 * env.pad);
    REQUIRE(std::abs(env.mu - 1.0) <= 2.0 * env.pad);
    REQUIRE(std::abs(env.kappa - pi / 2.0) <= 2.0 * env.derivative_pad);

    Signal g = discrete_sinc(4096);
    const double slack = 1e-3;
    std::vector<std::string> violations;
    for (int N : {1, 2, 4}) {
        ProbeConstants lc = probe_constants(env, N);
        Signal state = g;
        std::vector<double> energy(129, 0.0);
        for (int s = 0; s < N; ++s) {
            if (s > 0) state = convolve(a, state);
            for (std::int64_t lam = -64; lam <= 64; ++lam)
                energy[static_cast<std::size_t>(lam + 64)] += std::norm(state.at(lam));
        }
        for (std::int64_t lam = -64; lam <= 64; ++lam) {
            double e = energy[static_cast<std::size_t>(lam + 64)];
            double cap = lc.C_a / (1.0 + static_cast<double>(lam * lam));
            if (e > cap + slack)
                violations.push_back("N=" + std::to_string(N) + " upper at lambda=" +
                                     std::to_string(lam) + ": " + fmt(e) + " > " + fmt(cap));
            if (lam >= -1 && lam <= 1 && e < lc.c_a - slack)
                violations.push_back("N=" + std::to_string(N) + " lower at lambda=" +
                                     std::to_string(lam) + ": " + fmt(e) + " < " + fmt(lc.c_a));
        }
    }
    std::string detail = violations.empty() ? "all inequalities hold for N in {1, 2, 4}"
                                            : violations.front();
    report(6, "probe-energy constants", violations.empty(), detail);
    for (const std::string& v : violations) std::printf("[acceptance]   violation: %s\n", v.c_str());
    REQUIRE(violations.empty());
}

TEST_CASE("criterion 7: density certificates bracket exact densities") {
    Kernel a = cosine_kernel();
    RegularityEnvelope env = regularity(a, FrequencyGrid(4096));
    ProbeConstants lc = probe_constants(env, 2);
    struct Pair {
        int m, L;
    };
    std::vector<Pair> pairs{{1, 1}, {2, 2}, {3, 2}, {3, 3}, {4, 2}};
    bool all_ok = true;
    std::string detail;
    for (const Pair& p : pairs) {
        FrameBounds fb = empirical_frame_bounds(a, SamplingPattern::sublattice(p.m, p.L), 2,
                                                {-256, 255});
        REQUIRE(fb.c_min > 0.0);
        DensityCertificate cert = density_certificate(lc, fb);
        double exact = static_cast<double>(p.L) / p.m;
        bool ok = cert.lower <= exact && exact <= cert.upper && cert.upper <= 1.5;
        all_ok = all_ok && ok;
        detail += "(" + std::to_string(p.m) + "," + std::to_string(p.L) + "): [" +
                  fmt(cert.lower) + ", " + fmt(cert.upper) + "] covers " + fmt(exact) +
                  (ok ? "; " : " VIOLATED; ");
    }
    report(7, "density pipeline", all_ok, detail);
    REQUIRE(all_ok);
}

TEST_CASE("criterion 8: single-sensor lower bound decays with the window") {
    std::vector<std::int64_t> dims{64, 128, 256, 512, 1024};
    DecayCurve curve = finite_set_decay(transport(), std::vector<std::int64_t>{0}, dims);
    std::string values;
    for (const auto& p : curve.points) values += fmt(p.sigma_min_sq) + " ";
    bool pass = curve.strictly_decreasing && curve.final_over_initial < 0.1;
    report(8, "finite-set decay", pass,
           "sigma_min^2 = " + values + ", final/initial " + fmt(curve.final_over_initial));
    REQUIRE(curve.strictly_decreasing);
    REQUIRE(curve.final_over_initial < 0.1);
}

TEST_CASE("criterion 9: noise response is linear and tracks the inverse norm") {
    Signal f = oracle::random_signal(4242, 0, 64);
    std::vector<double> sigmas{1e-3, 1e-2, 1e-1};
    NoiseSweepTable base = noise_sweep(half_pair(), 2, 1, 2, f, sigmas, 100, 31337);

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        double x = std::log(sigmas[i]);
        double y = std::log(base.rows[i].mean_rel_err);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
    bool slope_ok = std::abs(slope - 1.0) <= 0.1;

    std::vector<double> mid{1e-2};
    NoiseSweepTable rough = noise_sweep(wide_gap(), 2, 1, 2, f, mid, 100, 31337);
    double ratio = rough.sup_inverse_norm / base.sup_inverse_norm;
    bool ratio_premise = ratio > 2.0;
    bool ordered = rough.rows[0].mean_rel_err > base.rows[1].mean_rel_err;
    bool pass = slope_ok && ratio_premise && ordered;
    report(9, "noise linearity", pass,
           "log-log slope " + fmt(slope) + ", inverse-norm ratio " + fmt(ratio) +
               ", error ratio " + fmt(rough.rows[0].mean_rel_err / base.rows[1].mean_rel_err));
    REQUIRE(slope_ok);
    REQUIRE(ratio_premise);
    REQUIRE(ordered);
}

TEST_CASE("criterion 10: every subcommand reproduces outputs byte for byte") {
    namespace tu = testutil;
    fs::path dir = fs::temp_directory_path() / "convds_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);

    io::write_file((dir / "half.csv").string(), io::kernel_to_csv(half_pair()));
    io::write_file((dir / "cosine.csv").string(), io::kernel_to_csv(cosine_kernel()));
    io::write_file((dir / "transport.csv").string(), io::kernel_to_csv(transport()));
    std::string half = (dir / "half.csv").string();

    auto config = [&dir](const std::string& name, const std::string& body) {
        io::write_file((dir / name).string(), body);
        return (dir / name).string();
    };

    std::vector<std::pair<std::string, std::string>> runs;
    runs.emplace_back("evolve", config("evolve.json",
        "{\"kernel\": \"" + half + "\", \"signal\": {\"random\": {\"seed\": 11, \"support\": 24}}, "
        "\"steps\": 3}"));
    runs.emplace_back("sample", config("sample.json",
        "{\"kernel\": \"" + half + "\", \"signal\": {\"random\": {\"seed\": 12, \"support\": 24}}, "
        "\"pattern\": {\"periodic\": {\"m\": 2, \"L\": 1}}, \"N\": 2, "
        "\"window\": {\"lo\": -4, \"hi\": 28}}"));
    runs.emplace_back("diagnose", config("diagnose.json",
        "{\"kernel\": \"" + half + "\", \"m\": 2, \"L\": 1, \"N\": 2, \"grid\": 128}"));
    runs.emplace_back("frame-bounds", config("fb.json",
        "{\"kernel\": \"" + half + "\", \"method\": \"empirical\", "
        "\"pattern\": {\"periodic\": {\"m\": 2, \"L\": 1}}, \"N\": 2, "
        "\"window\": {\"lo\": -64, \"hi\": 63}}"));
    runs.emplace_back("density", config("density.json",
        "{\"kernel\": \"" + (dir / "cosine.csv").string() + "\", \"m\": 2, \"L\": 2, \"N\": 2, "
        "\"grid\": 512, \"window\": {\"lo\": -96, \"hi\": 95}}"));
    runs.emplace_back("noise-sweep", config("sweep.json",
        "{\"kernel\": \"" + half + "\", \"signal\": {\"random\": {\"seed\": 13, \"support\": 16}}, "
        "\"m\": 2, \"L\": 1, \"N\": 2, \"sigmas\": [0.0, 0.01], \"trials\": 5, \"seed\": 7, "
        "\"sup_grid\": 128}"));
    runs.emplace_back("decay", config("decay.json",
        "{\"kernel\": \"" + (dir / "transport.csv").string() +
        "\", \"locations\": [0], \"dims\": [16, 32], \"n_rule\": \"dim\"}"));

    // reconstruct consumes the sample run's output; prepared after sampling
    bool all_identical = true;
    std::string failed_on;
    auto run_twice = [&](const std::string& sub, const std::string& cfg) {
        fs::path out1 = dir / (sub + "_run1");
        fs::path out2 = dir / (sub + "_run2");
        auto r1 = tu::run_command(tu::cli_path() + " " + sub + " --config " + cfg + " --out " +
                                  out1.string());
        auto r2 = tu::run_command(tu::cli_path() + " " + sub + " --config " + cfg + " --out " +
                                  out2.string());
        REQUIRE(r1.exit_code == 0);
        REQUIRE(r2.exit_code == 0);
        std::size_t files = 0;
        for (const auto& entry : fs::directory_iterator(out1)) {
            ++files;
            std::string name = entry.path().filename().string();
            if (io::read_file(entry.path().string()) !=
                io::read_file((out2 / name).string())) {
                all_identical = false;
                failed_on = sub + "/" + name;
            }
        }
        REQUIRE(files > 0);
    };

    for (const auto& [sub, cfg] : runs) run_twice(sub, cfg);

    std::string rec_cfg = config("rec.json",
        "{\"kernel\": \"" + half + "\", \"samples\": \"" +
        (dir / "sample_run1" / "samples.csv").string() + "\", "
        "\"pattern\": {\"periodic\": {\"m\": 2, \"L\": 1}}, \"N\": 2, "
        "\"signal_window\": {\"lo\": 0, \"hi\": 23}, \"sample_window\": {\"lo\": -4, \"hi\": 28}}");
    run_twice("reconstruct", rec_cfg);

    report(10, "determinism", all_identical,
           all_identical ? "8 subcommands, byte-identical artifacts"
                         : "first mismatch: " + failed_on);
    REQUIRE(all_identical);
    fs::remove_all(dir);
}
