#pragma once

#include <boost/crc.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ordo/classical/hamiltonian.hpp"
#include "ordo/classical/series.hpp"
#include "ordo/core/error.hpp"
#include "ordo/core/file_io.hpp"
#include "ordo/kernels/grid.hpp"
#include "ordo/opalg/measure.hpp"
#include "ordo/opalg/symbol.hpp"
#include "ordo/propagator/scheme.hpp"

namespace ordo::cli {

/// Invalid configuration: unknown key, malformed value, bad combination.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// One configurable key with its section and default value.
struct KeySpec {
    const char* section;
    const char* key;
    const char* fallback;
    const char* help;
};

// Key names are unique across sections, so a key given before any section
// header is unambiguous.
inline const std::vector<KeySpec>& key_table() {
    static const std::vector<KeySpec> table = {
        {"units", "hbar", "1", "reduced Planck constant"},
        {"units", "mass", "1", "particle mass"},
        {"hamiltonian", "potential", "harmonic:omega=1", "potential spec (free, linear:F=, harmonic:omega=, ...)"},
        {"hamiltonian", "u0", "", "magnetic term poly:c0,c1,... (empty for none)"},
        {"endpoints", "qa", "0", "initial position q_A"},
        {"endpoints", "qb", "1", "final position q_B"},
        {"action", "eps", "log:1e-3,1e-1,12", "eps values: list, log:lo,hi,n or lin:lo,hi,n"},
        {"action", "steps", "1024", "RK4 steps per trajectory"},
        {"action", "tol", "1e-30", "BVP tolerance on q(eps)"},
        {"grid", "grid", "-8,8,512", "position grid qmin,qmax,n"},
        {"quantize", "symbol", "q^2 p^2", "polynomial phase-space symbol"},
        {"quantize", "measure", "uniform", "tau measure (uniform, weyl, left, right, tau:r, mix:w@t,...)"},
        {"kernel", "format", "csv", "kernel matrix file format: csv or bin"},
        {"kernel", "pcut", "", "momentum cutoff for symbols beyond quadratic order"},
        {"kernel", "cutoffs", "", "energy cutoffs E for the pseudo-differential sweep"},
        {"propagator", "schemes", "left;midpoint;bj", "slice schemes separated by ';' or spaces"},
        {"propagator", "T", "0.5", "total propagation time"},
        {"propagator", "slices", "16,32,64,128,256", "slice counts N (strictly increasing)"},
        {"propagator", "dt", "log:0.01,0.2,10", "short-time dt values for the phase scaling"},
        {"chernoff", "t", "0.5", "Chernoff evolution time"},
        {"chernoff", "n", "8,32,128,512", "Chernoff iteration counts"},
        {"chernoff", "measures", "uniform;midpoint", "measures separated by ';' or spaces"},
        {"chernoff", "packet", "1,0,1", "Gaussian initial state q0,p0,width"},
        {"output", "out", "out", "artifact directory"},
    };
    return table;
}

inline const KeySpec* find_key(std::string_view key) {
    for (const auto& k : key_table())
        if (key == k.key) return &k;
    return nullptr;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> split(std::string_view s, std::string_view separators) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const std::size_t j = s.find_first_of(separators, i);
        const std::string_view item = trim(s.substr(i, j == std::string_view::npos ? s.npos : j - i));
        if (!item.empty()) out.emplace_back(item);
        if (j == std::string_view::npos) break;
        i = j + 1;
    }
    return out;
}

} // namespace detail

/// Effective run configuration: defaults, overridden by a config file,
/// overridden by command-line flags. Values stay as text until a typed
/// accessor parses them; validate() runs every accessor up front.
class RunConfig {
public:
    struct Entry {
        std::string value;
        std::string origin; ///< "default", "<file>:<line>" or "--flag"
        bool explicit_set = false;
    };

    RunConfig() {
        for (const auto& k : key_table()) entries_[k.key] = Entry{k.fallback, "default", false};
    }

    /// Parses `key = value` lines with `[section]` headers; '#' starts a comment.
    static RunConfig from_text(std::string_view text, const std::string& source = "<config>") {
        RunConfig cfg;
        cfg.merge_text(text, source);
        return cfg;
    }

    static RunConfig from_file(const std::filesystem::path& path) {
        if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
        return from_text(read_file(path), path.string());
    }

    void merge_text(std::string_view text, const std::string& source) {
        auto fail = [&](const std::string& what, std::size_t line, std::size_t column) {
            throw ParseError(source + ": " + what, line, column);
        };
        std::string section;
        std::map<std::string, std::size_t> seen;
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t eol = text.find('\n', pos);
            if (eol == std::string_view::npos) eol = text.size();
            std::string_view line = text.substr(pos, eol - pos);
            ++line_no;
            pos = eol + 1;
            if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
            const std::string_view body = detail::trim(line);
            const std::size_t indent = line.find_first_not_of(" \t\r") + 1;
            if (body.empty()) {
                if (eol == text.size()) break;
                continue;
            }
            if (body.front() == '[') {
                if (body.back() != ']') fail("unterminated section header", line_no, indent);
                section = std::string(detail::trim(body.substr(1, body.size() - 2)));
                const bool known = std::any_of(key_table().begin(), key_table().end(),
                                               [&](const KeySpec& k) { return section == k.section; });
                if (!known) fail("unknown section [" + section + "]", line_no, indent);
                continue;
            }
            const std::size_t eq = body.find('=');
            if (eq == std::string_view::npos) fail("expected 'key = value'", line_no, indent);
            const std::string key(detail::trim(body.substr(0, eq)));
            const std::string value(detail::trim(body.substr(eq + 1)));
            const KeySpec* spec = find_key(key);
            if (!spec) fail("unknown key '" + key + "'", line_no, indent);
            if (!section.empty() && section != spec->section)
                fail("key '" + key + "' belongs to [" + spec->section + "], not [" + section + "]", line_no, indent);
            if (auto [it, fresh] = seen.emplace(key, line_no); !fresh)
                fail("duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")", line_no,
                     indent);
            entries_[key] = Entry{value, source + ":" + std::to_string(line_no), true};
            if (eol == text.size()) break;
        }
    }

    /// Command-line override; `flag` names the origin in diagnostics.
    void set(const std::string& key, std::string value, const std::string& flag) {
        if (!find_key(key)) throw ConfigError("unknown key '" + key + "'");
        entries_[key] = Entry{std::move(value), flag, true};
    }

    const Entry& entry(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) throw ConfigError("unknown key '" + key + "'");
        return it->second;
    }
    const std::string& text(const std::string& key) const { return entry(key).value; }
    bool is_set(const std::string& key) const { return entry(key).explicit_set; }

    // ---- typed accessors -------------------------------------------------

    double number(const std::string& key) const { return to_number(key, text(key)); }

    int integer(const std::string& key) const {
        const double v = number(key);
        if (v != static_cast<int>(v)) fail(key, "expected an integer");
        return static_cast<int>(v);
    }

    double hbar() const {
        const double h = number("hbar");
        if (!(h > 0)) fail("hbar", "must be positive");
        return h;
    }
    double mass() const {
        const double m = number("mass");
        if (!(m > 0)) fail("mass", "must be positive");
        return m;
    }
    double q_A() const { return number("qa"); }
    double q_B() const { return number("qb"); }

    classical::HamiltonianSpec hamiltonian() const {
        const double m = mass();
        auto parse = [&](const std::string& key, auto&& fn) {
            try {
                return fn(text(key));
            } catch (const ParseError& e) {
                throw ConfigError(origin_prefix(key) + e.what());
            } catch (const DomainError& e) {
                throw ConfigError(origin_prefix(key) + e.what());
            }
        };
        const classical::Potential V =
            parse("potential", [&](const std::string& s) { return classical::parse_potential(s, m); });
        std::optional<classical::Potential> u0;
        if (!text("u0").empty())
            u0 = parse("u0", [](const std::string& s) { return classical::parse_magnetic(s); });
        try {
            return classical::HamiltonianSpec(m, V, u0);
        } catch (const DomainError& e) {
            throw ConfigError(origin_prefix("potential") + e.what());
        }
    }

    /// `v1,v2,...`, `log:lo,hi,n` or `lin:lo,hi,n`.
    std::vector<double> number_list(const std::string& key) const {
        const std::string& s = text(key);
        auto range = [&](std::string_view body, bool logarithmic) {
            const auto parts = detail::split(body, ",");
            if (parts.size() != 3) fail(key, "range needs lo,hi,n");
            const double lo = to_number(key, parts[0]), hi = to_number(key, parts[1]);
            const double n = to_number(key, parts[2]);
            if (n != static_cast<int>(n) || n < 2) fail(key, "range count must be an integer >= 2");
            if (logarithmic && !(lo > 0 && hi > lo)) fail(key, "log range needs 0 < lo < hi");
            if (!logarithmic && !(hi > lo)) fail(key, "range needs lo < hi");
            if (logarithmic) return classical::log_space(lo, hi, static_cast<int>(n));
            std::vector<double> v(static_cast<int>(n));
            for (int k = 0; k < static_cast<int>(n); ++k) v[k] = lo + (hi - lo) * k / (n - 1);
            return v;
        };
        if (s.rfind("log:", 0) == 0) return range(std::string_view(s).substr(4), true);
        if (s.rfind("lin:", 0) == 0) return range(std::string_view(s).substr(4), false);
        std::vector<double> out;
        for (const auto& item : detail::split(s, ",")) out.push_back(to_number(key, item));
        return out;
    }

    std::vector<int> integer_list(const std::string& key) const {
        std::vector<int> out;
        for (double v : number_list(key)) {
            if (v != static_cast<int>(v)) fail(key, "expected integers");
            out.push_back(static_cast<int>(v));
        }
        return out;
    }

    std::vector<double> eps_list() const {
        auto v = number_list("eps");
        for (double e : v)
            if (!(e > 0)) fail("eps", "values must be positive");
        return v;
    }

    /// dt values sorted from largest to smallest.
    std::vector<double> dt_list() const {
        auto v = number_list("dt");
        for (double d : v)
            if (!(d > 0)) fail("dt", "values must be positive");
        std::sort(v.rbegin(), v.rend());
        return v;
    }

    kernels::Grid1D grid() const {
        const auto parts = detail::split(text("grid"), ",");
        if (parts.size() != 3) fail("grid", "expected qmin,qmax,n");
        const double n = to_number("grid", parts[2]);
        if (n != static_cast<int>(n)) fail("grid", "n must be an integer");
        try {
            return kernels::Grid1D(to_number("grid", parts[0]), to_number("grid", parts[1]), static_cast<int>(n),
                                   hbar());
        } catch (const DomainError& e) {
            fail("grid", e.what());
        }
    }

    opalg::TauMeasure measure() const { return parse_measure_at("measure", text("measure")); }

    opalg::PolySymbol symbol() const {
        try {
            return opalg::parse_symbol(text("symbol"));
        } catch (const ParseError& e) {
            throw ConfigError(origin_prefix("symbol") + e.what());
        }
    }

    std::vector<propagator::SliceScheme> schemes() const {
        std::vector<propagator::SliceScheme> out;
        for (const auto& s : detail::split(text("schemes"), "; \t"))
            out.push_back(propagator::SliceScheme::from_measure(parse_measure_at("schemes", s)));
        if (out.empty()) fail("schemes", "at least one scheme is required");
        return out;
    }

    std::vector<opalg::TauMeasure> chernoff_measures() const {
        std::vector<opalg::TauMeasure> out;
        for (const auto& s : detail::split(text("measures"), "; \t")) out.push_back(parse_measure_at("measures", s));
        if (out.empty()) fail("measures", "at least one measure is required");
        return out;
    }

    std::optional<double> p_cutoff() const {
        if (text("pcut").empty()) return std::nullopt;
        const double v = number("pcut");
        if (!(v > 0)) fail("pcut", "must be positive");
        return v;
    }

    /// q0, p0, width of the Gaussian initial state.
    std::array<double, 3> packet() const {
        const auto v = number_list("packet");
        if (v.size() != 3) fail("packet", "expected q0,p0,width");
        if (!(v[2] > 0)) fail("packet", "width must be positive");
        return {v[0], v[1], v[2]};
    }

    std::string kernel_format() const {
        const std::string& f = text("format");
        if (f != "csv" && f != "bin") fail("format", "expected csv or bin");
        return f;
    }

    std::filesystem::path out_dir() const {
        if (text("out").empty()) fail("out", "output directory must not be empty");
        return text("out");
    }

    /// Parses every key, so that configuration errors surface before any
    /// computation starts.
    void validate() const {
        (void)hbar();
        (void)mass();
        (void)q_A();
        (void)q_B();
        (void)hamiltonian();
        if (eps_list().empty()) fail("eps", "at least one value is required");
        (void)integer("steps");
        if (!(number("tol") > 0)) fail("tol", "must be positive");
        (void)grid();
        (void)symbol();
        (void)measure();
        (void)kernel_format();
        (void)p_cutoff();
        for (double E : number_list("cutoffs"))
            if (E < 0) fail("cutoffs", "energy cutoffs must be non-negative");
        (void)schemes();
        if (!(number("T") > 0)) fail("T", "must be positive");
        (void)integer_list("slices");
        (void)dt_list();
        if (!(number("t") > 0)) fail("t", "must be positive");
        for (int n : integer_list("n"))
            if (n < 1) fail("n", "iteration counts must be >= 1");
        (void)chernoff_measures();
        (void)packet();
        (void)out_dir();
    }

    /// Canonical `section.key = value` listing of every effective value that
    /// affects results; the output directory is excluded.
    std::string canonical() const {
        std::vector<std::string> lines;
        for (const auto& k : key_table())
            if (std::string_view(k.section) != "output")
                lines.push_back(std::string(k.section) + "." + k.key + " = " + text(k.key));
        std::sort(lines.begin(), lines.end());
        std::string out;
        for (const auto& l : lines) out += l + "\n";
        return out;
    }

    /// CRC-32 of the canonical listing, as 8 hex digits.
    std::string hash() const {
        boost::crc_32_type crc;
        const std::string c = canonical();
        crc.process_bytes(c.data(), c.size());
        char buf[16];
        std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(crc.checksum()));
        return buf;
    }

private:
    std::string origin_prefix(const std::string& key) const {
        return "config '" + key + "' (" + entry(key).origin + "): ";
    }

    [[noreturn]] void fail(const std::string& key, const std::string& why) const {
        throw ConfigError(origin_prefix(key) + why + " (value '" + text(key) + "')");
    }

    double to_number(const std::string& key, const std::string& s) const {
        const std::string t(detail::trim(s));
        if (t.empty()) fail(key, "expected a number");
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (end != t.c_str() + t.size() || !std::isfinite(v)) fail(key, "bad number '" + t + "'");
        return v;
    }

    opalg::TauMeasure parse_measure_at(const std::string& key, std::string_view s) const {
        try {
            return opalg::parse_measure(s);
        } catch (const Error& e) {
            throw ConfigError(origin_prefix(key) + e.what());
        }
    }

    std::map<std::string, Entry> entries_;
};

} // namespace ordo::cli
