#pragma once

// Support code for the command-line tool: strict config schemas, provenance
// stamping, and artifact writers. Lives in the library tree so the pieces
// are unit-testable without spawning processes.

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "convds/convds.hpp"

namespace convds::cli {

using json = nlohmann::json;

/// Configuration problems exit with status 2; operation failures with 1.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Strict view over one subcommand's config object: every field access is
/// type-checked, defaulted fields are recorded, and unknown fields are a
/// hard error. Silent misconfiguration would invalidate certificates.
class ConfigView {
public:
    ConfigView(json data, std::set<std::string> allowed)
        : data_(std::move(data)), allowed_(std::move(allowed)) {
        if (!data_.is_object()) throw config_error("config must be a JSON object");
        for (const auto& [key, value] : data_.items()) {
            (void)value;
            if (!allowed_.count(key)) throw config_error("unknown config field '" + key + "'");
        }
    }

    bool has(const std::string& key) const { return data_.contains(key); }

    std::string require_string(const std::string& key) const {
        need(key);
        if (!data_[key].is_string())
            throw config_error("config field '" + key + "' must be a string");
        return data_[key].get<std::string>();
    }

    std::int64_t require_int(const std::string& key) const {
        need(key);
        if (!data_[key].is_number_integer())
            throw config_error("config field '" + key + "' must be an integer");
        return data_[key].get<std::int64_t>();
    }

    double require_double(const std::string& key) const {
        need(key);
        if (!data_[key].is_number())
            throw config_error("config field '" + key + "' must be a number");
        return data_[key].get<double>();
    }

    std::int64_t int_or(const std::string& key, std::int64_t fallback) {
        if (!has(key)) {
            defaults_.push_back(key);
            data_[key] = fallback;
            return fallback;
        }
        return require_int(key);
    }

    double double_or(const std::string& key, double fallback) {
        if (!has(key)) {
            defaults_.push_back(key);
            data_[key] = fallback;
            return fallback;
        }
        return require_double(key);
    }

    std::string string_or(const std::string& key, const std::string& fallback) {
        if (!has(key)) {
            defaults_.push_back(key);
            data_[key] = fallback;
            return fallback;
        }
        return require_string(key);
    }

    std::vector<double> require_double_list(const std::string& key) const {
        need(key);
        if (!data_[key].is_array())
            throw config_error("config field '" + key + "' must be an array");
        std::vector<double> out;
        for (const auto& v : data_[key]) {
            if (!v.is_number())
                throw config_error("config field '" + key + "' must hold numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }

    std::vector<std::int64_t> require_int_list(const std::string& key) const {
        need(key);
        if (!data_[key].is_array())
            throw config_error("config field '" + key + "' must be an array");
        std::vector<std::int64_t> out;
        for (const auto& v : data_[key]) {
            if (!v.is_number_integer())
                throw config_error("config field '" + key + "' must hold integers");
            out.push_back(v.get<std::int64_t>());
        }
        return out;
    }

    json require_object(const std::string& key) const {
        need(key);
        if (!data_[key].is_object())
            throw config_error("config field '" + key + "' must be an object");
        return data_[key];
    }

    json raw(const std::string& key) const {
        need(key);
        return data_[key];
    }

    void set(const std::string& key, json value) { data_[key] = std::move(value); }
    void erase(const std::string& key) { data_.erase(key); }

    const json& effective() const { return data_; }
    const std::vector<std::string>& defaults_applied() const { return defaults_; }

private:
    void need(const std::string& key) const {
        if (!data_.contains(key)) throw config_error("missing config field '" + key + "'");
    }

    json data_;
    std::set<std::string> allowed_;
    std::vector<std::string> defaults_;
};

inline IndexWindow parse_window(const json& w, const std::string& what) {
    if (!w.is_object() || !w.contains("lo") || !w.contains("hi") || w.size() != 2 ||
        !w["lo"].is_number_integer() || !w["hi"].is_number_integer())
        throw config_error("config field '" + what + "' must be {\"lo\": int, \"hi\": int}");
    IndexWindow out{w["lo"].get<std::int64_t>(), w["hi"].get<std::int64_t>()};
    if (!out.valid()) throw config_error("config field '" + what + "': lo must be <= hi");
    return out;
}

/// Signal source: a CSV path or {"random": {seed, support, start?, mode?}}.
struct SignalSpec {
    Signal signal{0, {cxd(0.0, 0.0)}};
    bool randomized = false;
    std::uint64_t seed = 0;
};

inline SignalSpec parse_signal(const json& spec, const std::string& what) {
    SignalSpec out;
    if (spec.is_string()) {
        try {
            out.signal = io::load_signal(spec.get<std::string>());
        } catch (const io_error& e) {
            throw config_error("config field '" + what + "': " + e.what());
        }
        return out;
    }
    if (!spec.is_object() || !spec.contains("random") || spec.size() != 1)
        throw config_error("config field '" + what +
                           "' must be a path or {\"random\": {...}}");
    const json& r = spec["random"];
    for (const auto& [key, value] : r.items()) {
        (void)value;
        if (key != "seed" && key != "support" && key != "start" && key != "mode")
            throw config_error("unknown config field '" + what + ".random." + key + "'");
    }
    if (!r.contains("seed") || !r["seed"].is_number_integer())
        throw config_error("config field '" + what + ".random.seed' must be an integer");
    if (!r.contains("support") || !r["support"].is_number_integer())
        throw config_error("config field '" + what + ".random.support' must be an integer");
    const std::int64_t support = r["support"].get<std::int64_t>();
    if (support < 1) throw config_error("config field '" + what + ".random.support' must be >= 1");
    const std::int64_t start = r.contains("start") ? r["start"].get<std::int64_t>() : 0;
    std::string mode = r.contains("mode") ? r["mode"].get<std::string>() : "complex";
    if (mode != "complex" && mode != "real")
        throw config_error("config field '" + what + ".random.mode' must be complex|real");

    out.randomized = true;
    out.seed = r["seed"].get<std::uint64_t>();
    std::vector<cxd> values(static_cast<std::size_t>(support));
    for (std::size_t i = 0; i < values.size(); ++i) {
        SplitMix64 g(derive_seed(out.seed, i));
        auto [re, im] = g.gaussian_pair();
        values[i] = mode == "real" ? cxd(re, 0.0) : cxd(re, im);
    }
    out.signal = Signal(start, std::move(values));
    return out;
}

/// Pattern source: {"periodic": {"m": int, "L": int}} or {"file": path}.
inline SamplingPattern parse_pattern(const json& spec, const std::string& what) {
    if (spec.is_object() && spec.contains("periodic") && spec.size() == 1) {
        const json& p = spec["periodic"];
        for (const auto& [key, value] : p.items()) {
            (void)value;
            if (key != "m" && key != "L")
                throw config_error("unknown config field '" + what + ".periodic." + key + "'");
        }
        if (!p.contains("m") || !p.contains("L") || !p["m"].is_number_integer() ||
            !p["L"].is_number_integer())
            throw config_error("config field '" + what + ".periodic' needs integer m and L");
        try {
            return SamplingPattern::sublattice(p["m"].get<int>(), p["L"].get<int>());
        } catch (const invalid_pattern_error& e) {
            throw config_error("config field '" + what + "': " + e.what());
        }
    }
    if (spec.is_object() && spec.contains("file") && spec.size() == 1) {
        try {
            return io::load_pattern(spec["file"].get<std::string>());
        } catch (const io_error& e) {
            throw config_error("config field '" + what + "': " + e.what());
        }
    }
    throw config_error("config field '" + what +
                       "' must be {\"periodic\": {m, L}} or {\"file\": path}");
}

inline Kernel parse_kernel(const std::string& path) {
    try {
        return io::load_kernel(path);
    } catch (const io_error& e) {
        throw config_error(std::string("config field 'kernel': ") + e.what());
    }
}

/// Identity stamp shared by every artifact a run writes.
struct Provenance {
    std::string subcommand;
    std::string config_hash;
    std::string seed = "none";
    int threads = 1;

    std::string csv_preamble() const {
        return "# convds " + subcommand + "\n# config_hash=" + config_hash +
               "\n# seed=" + seed + "\n";
    }

    void emit(io::JsonWriter& w) const {
        w.key("provenance").begin_object();
        w.field("subcommand", subcommand);
        w.field("config_hash", config_hash);
        w.field("seed", seed);
        w.field("threads", threads);
        w.end_object();
    }
};

inline std::string hash_config(const json& effective) {
    return io::hex64(io::fnv1a(effective.dump()));
}

inline void write_provenance_file(const std::filesystem::path& dir, const Provenance& prov,
                                  const ConfigView& cfg) {
    io::JsonWriter w;
    w.begin_object();
    w.field("tool", "convds 0.1.0");
    w.field("subcommand", prov.subcommand);
    w.field("config_hash", prov.config_hash);
    w.field("seed", prov.seed);
    w.field("threads", prov.threads);
    w.begin_array("defaults_applied");
    for (const std::string& d : cfg.defaults_applied()) w.value(d);
    w.end_array();
    w.key("effective_config");
    // nlohmann's dump is deterministic (keys sorted); splice it verbatim
    w.raw_value(cfg.effective().dump());
    w.end_object();
    io::write_file((dir / "provenance.json").string(), w.str() + "\n");
}

}  // namespace convds::cli
