#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "convds/common.hpp"
#include "convds/sampling.hpp"
#include "convds/signal.hpp"

namespace convds::io {

/// Decimal text with 17 significant digits: round-trips any IEEE double.
inline std::string fmt17(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
}

inline std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw io_error("write failed: " + path);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace detail {

/// Splits CSV content into non-empty, non-comment lines.
inline std::vector<std::string> data_lines(const std::string& content) {
    std::vector<std::string> lines;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        lines.push_back(line);
    }
    return lines;
}

inline std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw io_error("malformed " + what + ": '" + s + "'");
    }
}

inline std::int64_t parse_int(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw io_error("malformed " + what + ": '" + s + "'");
    }
}

}  // namespace detail

// --- kernel files: CSV `offset,re,im`, one tap per row ---

inline std::string kernel_to_csv(const Kernel& kernel, const std::string& preamble = "") {
    std::string out = preamble;
    out += "offset,re,im\n";
    for (const auto& [k, v] : kernel.taps()) {
        out += std::to_string(k) + "," + fmt17(v.real()) + "," + fmt17(v.imag()) + "\n";
    }
    return out;
}

inline Kernel kernel_from_csv(const std::string& content) {
    auto lines = detail::data_lines(content);
    if (lines.empty() || lines[0] != "offset,re,im")
        throw io_error("kernel csv: expected header 'offset,re,im'");
    std::vector<std::pair<std::int64_t, cxd>> taps;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto f = detail::split_commas(lines[i]);
        if (f.size() != 3) throw io_error("kernel csv: bad row '" + lines[i] + "'");
        taps.emplace_back(detail::parse_int(f[0], "kernel offset"),
                          cxd(detail::parse_double(f[1], "kernel re"),
                              detail::parse_double(f[2], "kernel im")));
    }
    try {
        return Kernel(std::move(taps));
    } catch (const std::invalid_argument& e) {
        throw io_error(std::string("kernel csv: ") + e.what());
    }
}

inline Kernel load_kernel(const std::string& path) { return kernel_from_csv(read_file(path)); }

// --- signal files: CSV `index,re,im` ---

inline std::string signal_to_csv(const Signal& f, const std::string& preamble = "") {
    std::string out = preamble;
    out += "index,re,im\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        const std::int64_t n = f.start() + static_cast<std::int64_t>(i);
        out += std::to_string(n) + "," + fmt17(f.values()[i].real()) + "," +
               fmt17(f.values()[i].imag()) + "\n";
    }
    return out;
}

inline Signal signal_from_csv(const std::string& content) {
    auto lines = detail::data_lines(content);
    if (lines.empty() || lines[0] != "index,re,im")
        throw io_error("signal csv: expected header 'index,re,im'");
    if (lines.size() < 2) throw io_error("signal csv: no rows");
    std::int64_t prev = 0;
    std::int64_t start = 0;
    std::vector<cxd> values;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto f = detail::split_commas(lines[i]);
        if (f.size() != 3) throw io_error("signal csv: bad row '" + lines[i] + "'");
        std::int64_t n = detail::parse_int(f[0], "signal index");
        if (i == 1) {
            start = n;
        } else if (n != prev + 1) {
            throw io_error("signal csv: indices must be consecutive");
        }
        prev = n;
        values.emplace_back(detail::parse_double(f[1], "signal re"),
                            detail::parse_double(f[2], "signal im"));
    }
    return Signal(start, std::move(values));
}

inline Signal load_signal(const std::string& path) { return signal_from_csv(read_file(path)); }

// --- pattern files: `periodic,m,L` or `explicit` + one integer per line ---

inline std::string pattern_to_text(const SamplingPattern& pattern,
                                   const std::string& preamble = "") {
    std::string out = preamble;
    if (pattern.is_periodic()) {
        if (!pattern.contiguous_offsets())
            throw io_error("pattern file: periodic form requires offsets 0..L-1");
        out += "periodic," + std::to_string(pattern.m()) + "," +
               std::to_string(pattern.offsets().size()) + "\n";
    } else {
        out += "explicit\n";
        for (std::int64_t p : pattern.points()) out += std::to_string(p) + "\n";
    }
    return out;
}

inline SamplingPattern pattern_from_text(const std::string& content) {
    auto lines = detail::data_lines(content);
    if (lines.empty()) throw io_error("pattern file: empty");
    if (lines[0].rfind("periodic,", 0) == 0) {
        auto f = detail::split_commas(lines[0]);
        if (f.size() != 3) throw io_error("pattern file: expected 'periodic,m,L'");
        try {
            return SamplingPattern::sublattice(
                static_cast<int>(detail::parse_int(f[1], "pattern m")),
                static_cast<int>(detail::parse_int(f[2], "pattern L")));
        } catch (const invalid_pattern_error& e) {
            throw io_error(std::string("pattern file: ") + e.what());
        }
    }
    if (lines[0] != "explicit")
        throw io_error("pattern file: expected 'periodic,m,L' or 'explicit'");
    std::vector<std::int64_t> pts;
    for (std::size_t i = 1; i < lines.size(); ++i)
        pts.push_back(detail::parse_int(lines[i], "pattern point"));
    try {
        return SamplingPattern::explicit_set(std::move(pts), {0, -1});
    } catch (const invalid_pattern_error& e) {
        throw io_error(std::string("pattern file: ") + e.what());
    }
}

inline SamplingPattern load_pattern(const std::string& path) {
    return pattern_from_text(read_file(path));
}

// --- samples files: CSV `s,lambda,re,im`, sorted by (s, lambda) ---

inline std::string samples_to_csv(const SpaceTimeSamples& samples,
                                  const std::string& preamble = "") {
    std::string out = preamble;
    out += "s,lambda,re,im\n";
    for (std::size_t s = 0; s < samples.values.size(); ++s) {
        for (std::size_t i = 0; i < samples.lambdas.size(); ++i) {
            out += std::to_string(s) + "," + std::to_string(samples.lambdas[i]) + "," +
                   fmt17(samples.values[s][i].real()) + "," + fmt17(samples.values[s][i].imag()) +
                   "\n";
        }
    }
    return out;
}

/// Reads sample rows back into the given metadata frame. The CSV holds the
/// data; pattern, N and windows travel in the run configuration.
inline SpaceTimeSamples samples_from_csv(const std::string& content,
                                         const SamplingPattern& pattern, int steps,
                                         IndexWindow signal_window, IndexWindow sample_window,
                                         const std::string& kernel_id = "") {
    auto lines = detail::data_lines(content);
    if (lines.empty() || lines[0] != "s,lambda,re,im")
        throw io_error("samples csv: expected header 's,lambda,re,im'");
    SpaceTimeSamples out;
    out.pattern = pattern;
    out.steps = steps;
    out.kernel_id = kernel_id;
    out.signal_window = signal_window;
    out.sample_window = sample_window;
    out.lambdas = pattern.enumerate(sample_window);
    out.values.assign(static_cast<std::size_t>(steps),
                      std::vector<cxd>(out.lambdas.size(), cxd(0.0, 0.0)));
    std::size_t row = 0;
    for (std::size_t i = 1; i < lines.size(); ++i, ++row) {
        auto f = detail::split_commas(lines[i]);
        if (f.size() != 4) throw io_error("samples csv: bad row '" + lines[i] + "'");
        std::int64_t s = detail::parse_int(f[0], "samples s");
        std::int64_t lambda = detail::parse_int(f[1], "samples lambda");
        std::size_t expect_s = row / out.lambdas.size();
        std::size_t expect_i = row % out.lambdas.size();
        if (s != static_cast<std::int64_t>(expect_s) ||
            out.lambdas.empty() || lambda != out.lambdas[expect_i])
            throw io_error("samples csv: rows out of order or inconsistent with pattern");
        out.values[expect_s][expect_i] = cxd(detail::parse_double(f[2], "samples re"),
                                             detail::parse_double(f[3], "samples im"));
    }
    if (row != out.lambdas.size() * static_cast<std::size_t>(steps))
        throw io_error("samples csv: row count does not match pattern and N");
    return out;
}

/// Minimal JSON emitter with caller-controlled key order and 17-digit
/// number formatting, so byte output is reproducible.
class JsonWriter {
public:
    std::string str() const { return out_; }

    JsonWriter& begin_object() {
        comma();
        out_ += "{";
        first_ = true;
        return *this;
    }
    JsonWriter& end_object() {
        out_ += "}";
        first_ = false;
        return *this;
    }
    JsonWriter& begin_array(const std::string& key) {
        this->key(key);
        out_ += "[";
        first_ = true;
        return *this;
    }
    JsonWriter& end_array() {
        out_ += "]";
        first_ = false;
        return *this;
    }
    JsonWriter& key(const std::string& k) {
        comma();
        out_ += quote(k) + ":";
        first_ = true;  // value follows without comma
        return *this;
    }
    JsonWriter& value(const std::string& v) {
        comma();
        out_ += quote(v);
        return *this;
    }
    JsonWriter& value(const char* v) { return value(std::string(v)); }
    JsonWriter& value(double v) {
        comma();
        if (std::isfinite(v)) {
            out_ += fmt17(v);
        } else {
            out_ += quote(v > 0 ? "inf" : (v < 0 ? "-inf" : "nan"));
        }
        return *this;
    }
    JsonWriter& value(std::int64_t v) {
        comma();
        out_ += std::to_string(v);
        return *this;
    }
    JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
    JsonWriter& value(std::uint64_t v) {
        comma();
        out_ += std::to_string(v);
        return *this;
    }
    JsonWriter& value(bool v) {
        comma();
        out_ += v ? "true" : "false";
        return *this;
    }
    JsonWriter& field(const std::string& k, double v) { return key(k).value(v); }
    JsonWriter& field(const std::string& k, std::int64_t v) { return key(k).value(v); }
    JsonWriter& field(const std::string& k, int v) { return key(k).value(v); }
    JsonWriter& field(const std::string& k, std::uint64_t v) { return key(k).value(v); }
    JsonWriter& field(const std::string& k, bool v) { return key(k).value(v); }
    JsonWriter& field(const std::string& k, const std::string& v) { return key(k).value(v); }
    JsonWriter& field(const std::string& k, const char* v) { return key(k).value(v); }

    /// Splices pre-serialized JSON in value position.
    JsonWriter& raw_value(const std::string& text) {
        comma();
        out_ += text;
        return *this;
    }

private:
    static std::string quote(const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            switch (c) {
                case '"': q += "\\\""; break;
                case '\\': q += "\\\\"; break;
                case '\n': q += "\\n"; break;
                case '\t': q += "\\t"; break;
                case '\r': q += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                        q += buf;
                    } else {
                        q += c;
                    }
            }
        }
        q += "\"";
        return q;
    }

    void comma() {
        if (!first_) out_ += ",";
        first_ = false;
    }

    std::string out_;
    bool first_ = true;
};

}  // namespace convds::io
