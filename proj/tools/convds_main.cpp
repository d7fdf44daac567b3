// convds: convolutional dynamical sampling toolkit, command-line front end.
//
// Every subcommand reads one JSON config object, writes its artifacts into
// the output directory, and stamps each artifact with the config hash and
// seed so a re-run reproduces outputs byte for byte.
//
// Exit codes: 0 success, 1 operation-level failure, 2 config or file error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "convds/cli_support.hpp"

namespace fs = std::filesystem;
using namespace convds;
using cli::ConfigView;
using cli::config_error;
using cli::json;
using cli::Provenance;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_override;
    int threads = 1;
    int grid_override = 0;
    bool allow_partial = false;
};

json load_config(const std::string& path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const io_error& e) {
        throw config_error(e.what());
    }
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded()) throw config_error("config file is not valid JSON: " + path);
    return parsed;
}

// The destination is an execution parameter, not config identity: it is
// dropped from the effective config so artifacts hash the same wherever
// they are written.
fs::path resolve_out_dir(ConfigView& cfg, const CommonArgs& args) {
    std::string out = args.out_override;
    if (out.empty() && cfg.has("out")) out = cfg.require_string("out");
    if (out.empty()) throw config_error("missing config field 'out' (or pass --out DIR)");
    cfg.erase("out");
    fs::create_directories(out);
    return fs::path(out);
}

int resolve_grid(ConfigView& cfg, const CommonArgs& args, std::int64_t fallback) {
    std::int64_t g = args.grid_override > 0 ? args.grid_override : cfg.int_or("grid", fallback);
    if (args.grid_override > 0) cfg.set("grid", args.grid_override);
    if (g < 1) throw config_error("config field 'grid' must be >= 1");
    return static_cast<int>(g);
}

Provenance make_provenance(const std::string& subcommand, const ConfigView& cfg,
                           const CommonArgs& args, std::uint64_t seed, bool has_seed) {
    Provenance prov;
    prov.subcommand = subcommand;
    prov.config_hash = cli::hash_config(cfg.effective());
    prov.threads = args.threads;
    if (has_seed) prov.seed = std::to_string(seed);
    return prov;
}

// --- evolve: apply A^s to a signal and write the result ---

int run_evolve(const CommonArgs& args) {
    ConfigView cfg(load_config(args.config_path), {"kernel", "signal", "steps", "out"});
    Kernel kernel = cli::parse_kernel(cfg.require_string("kernel"));
    cli::SignalSpec sig = cli::parse_signal(cfg.raw("signal"), "signal");
    std::int64_t steps = cfg.require_int("steps");
    if (steps < 0) throw config_error("config field 'steps' must be >= 0");
    fs::path out = resolve_out_dir(cfg, args);
    Provenance prov = make_provenance("evolve", cfg, args, sig.seed, sig.randomized);

    Signal evolved = evolve(kernel, sig.signal, static_cast<int>(steps));
    io::write_file((out / "evolved.csv").string(),
                   io::signal_to_csv(evolved, prov.csv_preamble()));
    cli::write_provenance_file(out, prov, cfg);
    return 0;
}

// --- sample: collect space-time samples on a pattern ---

int run_sample(const CommonArgs& args) {
    ConfigView cfg(load_config(args.config_path),
                   {"kernel", "signal", "pattern", "N", "window", "out"});
    Kernel kernel = cli::parse_kernel(cfg.require_string("kernel"));
    cli::SignalSpec sig = cli::parse_signal(cfg.raw("signal"), "signal");
    SamplingPattern pattern = cli::parse_pattern(cfg.raw("pattern"), "pattern");
    std::int64_t N = cfg.require_int("N");
    if (N < 1) throw config_error("config field 'N' must be >= 1");
    IndexWindow window = cli::parse_window(cfg.raw("window"), "window");
    fs::path out = resolve_out_dir(cfg, args);
    Provenance prov = make_provenance("sample", cfg, args, sig.seed, sig.randomized);

    SpaceTimeSamples samples =
        collect(kernel, sig.signal, pattern, static_cast<int>(N), window);
    std::string preamble = prov.csv_preamble();
    preamble += "# kernel_id=" + samples.kernel_id + "\n";
    preamble += "# signal_window=" + std::to_string(samples.signal_window.lo) + ":" +
                std::to_string(samples.signal_window.hi) + "\n";
    io::write_file((out / "samples.csv").string(), io::samples_to_csv(samples, preamble));
    cli::write_provenance_file(out, prov, cfg);
    return 0;
}

// --- reconstruct: solve the per-frequency systems for the initial signal ---

int run_reconstruct(const CommonArgs& args) {
    ConfigView cfg(load_config(args.config_path),
                   {"kernel", "samples", "pattern", "N", "signal_window", "sample_window",
                    "rank_tol", "out"});
    Kernel kernel = cli::parse_kernel(cfg.require_string("kernel"));
    SamplingPattern pattern = cli::parse_pattern(cfg.raw("pattern"), "pattern");
    std::int64_t N = cfg.require_int("N");
    if (N < 1) throw config_error("config field 'N' must be >= 1");
    IndexWindow signal_window = cli::parse_window(cfg.raw("signal_window"), "signal_window");
    IndexWindow sample_window = cli::parse_window(cfg.raw("sample_window"), "sample_window");
    double rank_tol = cfg.double_or("rank_tol", 1e-8);
    std::string samples_path = cfg.require_string("samples");
    fs::path out = resolve_out_dir(cfg, args);
    Provenance prov = make_provenance("reconstruct", cfg, args, 0, false);

    SpaceTimeSamples samples;
    try {
        samples = io::samples_from_csv(io::read_file(samples_path), pattern,
                                       static_cast<int>(N), signal_window, sample_window,
                                       kernel_identifier(kernel));
    } catch (const io_error& e) {
        throw config_error(std::string("config field 'samples': ") + e.what());
    }

    ReconstructionResult rec = reconstruct(samples, kernel, rank_tol, args.threads);

    io::write_file((out / "reconstructed.csv").string(),
                   io::signal_to_csv(rec.f_rec, prov.csv_preamble()));
    io::JsonWriter w;
    w.begin_object();
    w.field("status", to_string(rec.status));
    w.field("period", rec.period);
    w.field("bins", rec.bins);
    w.field("min_sigma_min", rec.min_sigma_min);
    w.field("max_sigma_min", rec.max_sigma_min);
    double residual = 0.0;
    for (double r : rec.bin_residuals) residual += r * r;
    w.field("total_residual", std::sqrt(residual));
    w.begin_array("rank_deficient_bins");
    for (int b : rec.deficient_bins) w.value(b);
    w.end_array();
    prov.emit(w);
    w.end_object();
    io::write_file((out / "reconstruction.json").string(), w.str() + "\n");
    cli::write_provenance_file(out, prov, cfg);

    if (rec.status == ReconStatus::rank_deficient && !args.allow_partial) {
        std::cerr << "reconstruct: " << rec.deficient_bins.size()
                  << " rank-deficient bins (re-run with --allow-partial to keep the "
                     "minimum-norm result)\n";
        return 1;
    }
    return 0;
}

// --- diagnose: per-frequency sweep + completeness verdict ---

int run_diagnose(const CommonArgs& args) {
    ConfigView cfg(load_config(args.config_path),
                   {"kernel", "m", "L", "N", "grid", "rank_tol", "out"});
    Kernel kernel = cli::parse_kernel(cfg.require_string("kernel"));
    std::int64_t m = cfg.require_int("m");
    std::int64_t L = cfg.require_int("L");
    std::int64_t N = cfg.require_int("N");
    if (m < 1 || L < 1 || L > m || N < 1)
        throw config_error("config fields m, L, N must satisfy m >= 1, 1 <= L <= m, N >= 1");
    int grid = resolve_grid(cfg, args, 512);
    double rank_tol = cfg.double_or("rank_tol", 1e-8);
    fs::path out = resolve_out_dir(cfg, args);
    Provenance prov = make_provenance("diagnose", cfg, args, 0, false);

    FrequencyGrid fgrid(grid);
    auto rows = spectral_diagnostics(kernel, static_cast<int>(m), static_cast<int>(L),
                                     static_cast<int>(N), fgrid, args.threads);
    std::string csv = prov.csv_preamble();
    csv += "omega,sigma_min,sigma_max,gautschi_bound,max_cluster\n";
    for (const auto& r : rows) {
        csv += io::fmt17(r.omega) + "," + io::fmt17(r.sigma_min) + "," + io::fmt17(r.sigma_max) +
               "," + io::fmt17(r.gautschi) + "," + std::to_string(r.max_cluster) + "\n";
    }
    io::write_file((out / "diagnostics.csv").string(), csv);

    CompletenessReport verdict =
        completeness_check(kernel, static_cast<int>(m), static_cast<int>(L),
                           static_cast<int>(N), fgrid, rank_tol, args.threads);
    io::JsonWriter w;
    w.begin_object();
    w.field("verdict", to_string(verdict.verdict));
    w.field("reason", verdict.reason);
    w.field("witness_omega", verdict.witness_omega);
    w.field("n_max", verdict.max_multiplicity);
    w.field("nl", verdict.nl);
    w.field("m", verdict.m);
    w.field("min_sigma_min", verdict.min_sigma_min);
    w.field("rank_tol", verdict.rank_tol);
    w.begin_array("colliding_nodes");
    for (int c : verdict.colliding) w.value(c);
    w.end_array();
    prov.emit(w);
    w.end_object();
    io::write_file((out / "verdict.json").string(), w.str() + "\n");
    cli::write_provenance_file(out, prov, cfg);
    return 0;
}

// --- frame-bounds: analytic or empirical frame constants ---

int run_frame_bounds(const CommonArgs& args) {
    ConfigView cfg(load_config(args.config_path),
                   {"kernel", "method", "m", "grid", "pattern", "N", "window",
                    "interior_margin", "out"});
    Kernel kernel = cli::parse_kernel(cfg.require_string("kernel"));
    std::string method = cfg.require_string("method");
    fs::path out = resolve_out_dir(cfg, args);

    FrameBounds fb;
    if (method == "analytic") {
        std::int64_t m = cfg.require_int("m");
        if (m < 1) throw config_error("config field 'm' must be >= 1");
        int grid = resolve_grid(cfg, args, 512);
        Provenance prov = make_provenance("frame-bounds", cfg, args, 0, false);
        fb = analytic_frame_bounds(kernel, static_cast<int>(m), FrequencyGrid(grid),
                                   args.threads);
        io::JsonWriter w;
        w.begin_object();
        w.field("method", to_string(fb.method));
        w.field("c_min", fb.c_min);
        w.field("c_max", fb.c_max);
        w.field("no_frame", fb.no_frame);
        w.field("m", fb.m);
        w.field("L", fb.L);
        w.field("N", fb.steps);
        w.field("grid", grid);
        prov.emit(w);
        w.end_object();
        io::write_file((out / "frame_bounds.json").string(), w.str() + "\n");
        cli::write_provenance_file(out, prov, cfg);
    } else if (method == "empirical") {
        SamplingPattern pattern = cli::parse_pattern(cfg.raw("pattern"), "pattern");
        std::int64_t N = cfg.require_int("N");
        if (N < 1) throw config_error("config field 'N' must be >= 1");
        IndexWindow window = cli::parse_window(cfg.raw("window"), "window");
        std::int64_t margin = cfg.int_or("interior_margin", -1);
        Provenance prov = make_provenance("frame-bounds", cfg, args, 0, false);
        fb = empirical_frame_bounds(kernel, pattern, static_cast<int>(N), window, margin);
        io::JsonWriter w;
        w.begin_object();
        w.field("method", to_string(fb.method));
        w.field("c_min", fb.c_min);
        w.field("c_max", fb.c_max);
        w.field("no_frame", fb.no_frame);
        w.field("m", fb.m);
        w.field("L", fb.L);
        w.field("N", fb.steps);
        w.key("window").begin_object();
        w.field("lo", window.lo);
        w.field("hi", window.hi);
        w.end_object();
        prov.emit(w);
        w.end_object();
        io::write_file((out / "frame_bounds.json").string(), w.str() + "\n");
        cli::write_provenance_file(out, prov, cfg);
    } else {
        throw config_error("config field 'method' must be analytic|empirical");
    }
    if (fb.no_frame) {
        std::cerr << "frame-bounds: lower bound degenerated to zero (no frame)\n";
        return 1;
    }
    return 0;
}

// --- density: regularity -> probe constants -> frame bounds -> certificate ---

int run_density(const CommonArgs& args) {
    ConfigView cfg(load_config(args.config_path),
                   {"kernel", "m", "L", "N", "grid", "window", "interior_margin", "out"});
    std::string kernel_path = cfg.require_string("kernel");
    Kernel kernel = cli::parse_kernel(kernel_path);
    std::int64_t m = cfg.require_int("m");
    std::int64_t L = cfg.require_int("L");
    std::int64_t N = cfg.require_int("N");
    if (m < 1 || L < 1 || L > m || N < 1)
        throw config_error("config fields m, L, N must satisfy m >= 1, 1 <= L <= m, N >= 1");
    int grid = resolve_grid(cfg, args, 4096);
    IndexWindow window = cli::parse_window(cfg.raw("window"), "window");
    std::int64_t margin = cfg.int_or("interior_margin", -1);
    fs::path out = resolve_out_dir(cfg, args);
    Provenance prov = make_provenance("density", cfg, args, 0, false);

    RegularityEnvelope env = regularity(kernel, FrequencyGrid(grid));
    ProbeConstants lc = probe_constants(env, static_cast<int>(N));
    SamplingPattern pattern =
        SamplingPattern::sublattice(static_cast<int>(m), static_cast<int>(L));
    FrameBounds fb = empirical_frame_bounds(kernel, pattern, static_cast<int>(N), window,
                                            margin);
    DensityCertificate cert = density_certificate(lc, fb);

    io::JsonWriter w;
    w.begin_object();
    w.field("nu", env.nu);
    w.field("mu", env.mu);
    w.field("kappa", env.kappa);
    w.field("N", static_cast<std::int64_t>(N));
    w.field("c_a", lc.c_a);
    w.field("C_a", lc.C_a);
    w.field("c_min", fb.c_min);
    w.field("c_max", fb.c_max);
    w.field("method", to_string(fb.method));
    w.field("lower", cert.lower);
    w.field("upper", cert.upper);
    w.field("exact_density", static_cast<double>(L) / static_cast<double>(m));
    w.key("inputs").begin_object();
    w.field("kernel_file_hash", io::hex64(io::fnv1a(io::read_file(kernel_path))));
    w.field("grid", grid);
    w.key("window").begin_object();
    w.field("lo", window.lo);
    w.field("hi", window.hi);
    w.end_object();
    w.field("m", static_cast<std::int64_t>(m));
    w.field("L", static_cast<std::int64_t>(L));
    w.end_object();
    prov.emit(w);
    w.end_object();
    io::write_file((out / "certificate.json").string(), w.str() + "\n");
    cli::write_provenance_file(out, prov, cfg);
    return 0;
}

// --- noise-sweep: reconstruction error vs noise level ---

int run_noise_sweep(const CommonArgs& args) {
    ConfigView cfg(load_config(args.config_path),
                   {"kernel", "signal", "m", "L", "N", "sigmas", "trials", "seed", "mode",
                    "sup_grid", "out"});
    Kernel kernel = cli::parse_kernel(cfg.require_string("kernel"));
    cli::SignalSpec sig = cli::parse_signal(cfg.raw("signal"), "signal");
    std::int64_t m = cfg.require_int("m");
    std::int64_t L = cfg.require_int("L");
    std::int64_t N = cfg.require_int("N");
    if (m < 1 || L < 1 || L > m || N < 1)
        throw config_error("config fields m, L, N must satisfy m >= 1, 1 <= L <= m, N >= 1");
    std::vector<double> sigmas = cfg.require_double_list("sigmas");
    for (double s : sigmas)
        if (s < 0.0) throw config_error("config field 'sigmas' must be >= 0");
    std::int64_t trials = cfg.require_int("trials");
    if (trials < 1) throw config_error("config field 'trials' must be >= 1");
    std::uint64_t seed = static_cast<std::uint64_t>(cfg.require_int("seed"));
    std::string mode_name = cfg.string_or("mode", "complex-circular");
    NoiseSpec::Mode mode;
    if (mode_name == "real-only")
        mode = NoiseSpec::Mode::real_only;
    else if (mode_name == "complex-circular")
        mode = NoiseSpec::Mode::complex_circular;
    else
        throw config_error("config field 'mode' must be real-only|complex-circular");
    std::int64_t sup_grid = cfg.int_or("sup_grid", 512);
    fs::path out = resolve_out_dir(cfg, args);
    Provenance prov = make_provenance("noise-sweep", cfg, args, seed, true);

    NoiseSweepTable table =
        noise_sweep(kernel, static_cast<int>(m), static_cast<int>(L), static_cast<int>(N),
                    sig.signal, sigmas, static_cast<int>(trials), seed, mode,
                    static_cast<int>(sup_grid), args.threads);
    std::string csv = prov.csv_preamble();
    csv += "sigma,mean_rel_err,std_rel_err,trials,sup_inverse_norm\n";
    for (const auto& row : table.rows) {
        csv += io::fmt17(row.sigma) + "," + io::fmt17(row.mean_rel_err) + "," +
               io::fmt17(row.std_rel_err) + "," + std::to_string(row.trials) + "," +
               io::fmt17(table.sup_inverse_norm) + "\n";
    }
    io::write_file((out / "noise_sweep.csv").string(), csv);
    cli::write_provenance_file(out, prov, cfg);
    return 0;
}

// --- decay: finite spatial sets against growing windows ---

int run_decay(const CommonArgs& args) {
    ConfigView cfg(load_config(args.config_path),
                   {"kernel", "locations", "dims", "n_rule", "out"});
    Kernel kernel = cli::parse_kernel(cfg.require_string("kernel"));
    std::vector<std::int64_t> locations = cfg.require_int_list("locations");
    std::vector<std::int64_t> dims = cfg.require_int_list("dims");
    json n_rule_spec = cfg.has("n_rule") ? cfg.raw("n_rule") : json("dim");
    cfg.set("n_rule", n_rule_spec);
    std::function<int(std::int64_t)> n_rule;
    if (n_rule_spec.is_string() && n_rule_spec.get<std::string>() == "dim") {
        n_rule = [](std::int64_t dim) { return static_cast<int>(dim); };
    } else if (n_rule_spec.is_number_integer() && n_rule_spec.get<std::int64_t>() >= 1) {
        int fixed = n_rule_spec.get<int>();
        n_rule = [fixed](std::int64_t) { return fixed; };
    } else {
        throw config_error("config field 'n_rule' must be \"dim\" or a positive integer");
    }
    fs::path out = resolve_out_dir(cfg, args);
    Provenance prov = make_provenance("decay", cfg, args, 0, false);

    DecayCurve curve;
    try {
        curve = finite_set_decay(kernel, locations, dims, n_rule, args.threads);
    } catch (const std::invalid_argument& e) {
        throw config_error(e.what());
    }
    std::string csv = prov.csv_preamble();
    csv += "dim,sigma_min_sq\n";
    for (const auto& p : curve.points)
        csv += std::to_string(p.dim) + "," + io::fmt17(p.sigma_min_sq) + "\n";
    io::write_file((out / "decay.csv").string(), csv);
    cli::write_provenance_file(out, prov, cfg);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"convds: convolutional dynamical sampling toolkit"};
    app.require_subcommand(1);

    struct Sub {
        std::string name;
        std::string help;
        int (*run)(const CommonArgs&);
        bool has_partial = false;
    };
    const std::vector<Sub> subs = {
        {"evolve", "apply the convolution operator repeatedly and write the result", run_evolve},
        {"sample", "collect space-time samples on a spatial pattern", run_sample},
        {"reconstruct", "recover the initial signal from space-time samples", run_reconstruct,
         true},
        {"diagnose", "per-frequency singular values, node bounds, completeness verdict",
         run_diagnose},
        {"frame-bounds", "analytic or empirical frame constants", run_frame_bounds},
        {"density", "Banach-density certificate from frame bounds and probe constants",
         run_density},
        {"noise-sweep", "reconstruction error statistics under Gaussian sample noise",
         run_noise_sweep},
        {"decay", "lower frame bound decay for finite sampling sets", run_decay},
    };

    CommonArgs args;
    int (*selected)(const CommonArgs&) = nullptr;
    for (const Sub& sub : subs) {
        CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
        cmd->add_option("--config", args.config_path, "path to the JSON config object")
            ->required();
        cmd->add_option("--out", args.out_override, "output directory (overrides config)");
        cmd->add_option("--threads", args.threads, "worker thread cap")->default_val(1);
        cmd->add_option("--grid", args.grid_override,
                        "frequency grid size override (grid-based subcommands)");
        if (sub.has_partial)
            cmd->add_flag("--allow-partial", args.allow_partial,
                          "exit 0 even when bins are rank deficient");
        cmd->callback([&selected, &sub] { selected = sub.run; });
    }

    CLI11_PARSE(app, argc, argv);

    if (args.threads < 1) {
        std::cerr << "error: --threads must be >= 1\n";
        return 2;
    }
    if (args.grid_override > 0 && selected != run_diagnose &&
        selected != run_frame_bounds && selected != run_density) {
        std::cerr << "error: --grid does not apply to this subcommand\n";
        return 2;
    }

    try {
        return selected(args);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const io_error& e) {
        std::cerr << "file error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
