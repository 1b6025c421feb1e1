#pragma once

#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "ordo/cli/config.hpp"
#include "ordo/core/error.hpp"
#include "ordo/core/file_io.hpp"

namespace ordo::cli {

using json = nlohmann::ordered_json;

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitNonConvergence = 3,
    kExitMissingArtifact = 4,
};

/// A run needs artifacts from earlier runs that are not on disk.
class MissingArtifact : public Error {
public:
    explicit MissingArtifact(std::vector<std::filesystem::path> missing)
        : Error(message(missing)), missing_(std::move(missing)) {}

    const std::vector<std::filesystem::path>& missing() const { return missing_; }

private:
    static std::string message(const std::vector<std::filesystem::path>& missing) {
        std::string s = "missing artifacts:";
        for (const auto& p : missing) s += " " + p.string();
        s += " (run the producing commands first or pass --run-all)";
        return s;
    }

    std::vector<std::filesystem::path> missing_;
};

/// Maps a library exception to the process exit code.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const MissingArtifact*>(&e)) return kExitMissingArtifact;
    if (dynamic_cast<const NoConvergence*>(&e) || dynamic_cast<const ConjugatePoint*>(&e) ||
        dynamic_cast<const NumericOverflow*>(&e))
        return kExitNonConvergence;
    return kExitConfig;
}

/// Maps -0.0 to 0.0 so that artifacts never show a signed zero.
inline double clean(double x) { return x == 0.0 ? 0.0 : x; }

/// JSON number, or null for non-finite values.
inline json num(double x) { return std::isfinite(x) ? json(clean(x)) : json(nullptr); }

inline json num_array(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

/// CSV artifact: a comment line with the config hash, a header row, then rows.
class CsvTable {
public:
    CsvTable(std::string command, const RunConfig& cfg, std::vector<std::string> header)
        : command_(std::move(command)), hash_(cfg.hash()), header_(std::move(header)) {}

    /// Adds a row; each cell is either text or a number rendered by format_double.
    class Row {
    public:
        Row& text(const std::string& s) {
            cells_.push_back(s);
            return *this;
        }
        Row& number(double x) {
            cells_.push_back(format_double(clean(x)));
            return *this;
        }
        Row& integer(long long x) {
            cells_.push_back(std::to_string(x));
            return *this;
        }

    private:
        friend class CsvTable;
        std::vector<std::string> cells_;
    };

    Row& row() { return rows_.emplace_back(); }

    std::string str() const {
        std::string out = "# config_hash=" + hash_ + " command=" + command_ + "\n";
        out += join(header_);
        for (const auto& r : rows_) {
            if (r.cells_.size() != header_.size()) throw Error("CSV row width does not match header");
            out += join(r.cells_);
        }
        return out;
    }

    void write(const std::filesystem::path& path) const { write_file_atomic(path, str()); }

private:
    static std::string join(const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
        return s + "\n";
    }

    std::string command_;
    std::string hash_;
    std::vector<std::string> header_;
    std::vector<Row> rows_;
};

inline void write_json(const std::filesystem::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

inline json read_json(const std::filesystem::path& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw Error("malformed artifact " + path.string() + ": " + e.what());
    }
}

} // namespace ordo::cli
