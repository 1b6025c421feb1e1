#pragma once

#include <Eigen/Dense>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "ordo/core/error.hpp"
#include "ordo/core/file_io.hpp"
#include "ordo/kernels/grid.hpp"

namespace ordo::kernels {

// Binary layout: little-endian float64 throughout. Header n, q_min, q_max,
// hbar, followed by (re, im) pairs in row-major order.
// CSV layout: one comment line with the grid, then one line per matrix row
// (or one line per wavefunction sample) of comma-separated re,im pairs.

namespace detail {

inline void put_f64(std::string& out, double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

inline double get_f64(const std::string& in, std::size_t& pos) {
    if (pos + 8 > in.size()) throw Error("binary data truncated");
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
    pos += 8;
    double x;
    std::memcpy(&x, &bits, sizeof x);
    return x;
}

inline std::string grid_header(const Grid1D& g) {
    std::string out;
    for (double x : {static_cast<double>(g.n()), g.q_min(), g.q_max(), g.hbar()}) put_f64(out, x);
    return out;
}

inline Grid1D read_grid_header(const std::string& in, std::size_t& pos) {
    const double n = get_f64(in, pos);
    const double q_min = get_f64(in, pos), q_max = get_f64(in, pos), hbar = get_f64(in, pos);
    return Grid1D(q_min, q_max, static_cast<int>(n), hbar);
}

inline std::string csv_grid_comment(const Grid1D& g) {
    return "# n=" + std::to_string(g.n()) + ",q_min=" + format_double(g.q_min()) + ",q_max=" + format_double(g.q_max()) +
           ",hbar=" + format_double(g.hbar()) + "\n";
}

inline Grid1D parse_csv_grid_comment(const std::string& line) {
    int n = 0;
    double q_min = 0, q_max = 0, hbar = 0;
    if (std::sscanf(line.c_str(), "# n=%d,q_min=%lf,q_max=%lf,hbar=%lf", &n, &q_min, &q_max, &hbar) != 4)
        throw ParseError("bad grid comment line", 1, 1);
    return Grid1D(q_min, q_max, n, hbar);
}

inline bool next_row(std::istream& in, std::string& line, std::size_t& line_no) {
    if (!std::getline(in, line)) return false;
    ++line_no;
    return true;
}

/// Reads the grid comment, skipping a leading provenance comment line and an
/// optional `re_0,im_0,...` header row after it.
inline Grid1D read_csv_preamble(std::istream& in, std::size_t& line_no) {
    std::string line;
    do {
        if (!next_row(in, line, line_no)) throw ParseError("CSV has no grid comment line", line_no + 1, 1);
    } while (line.rfind("# n=", 0) != 0 && line.rfind('#', 0) == 0);
    const Grid1D g = parse_csv_grid_comment(line);
    if (in.peek() == 'r') {
        std::getline(in, line);
        ++line_no;
        if (line.rfind("re_", 0) != 0) throw ParseError("unexpected CSV header row", line_no, 1);
    }
    return g;
}

inline std::vector<cplx> parse_csv_row(const std::string& line, std::size_t line_no) {
    std::vector<double> vals;
    std::size_t start = 0;
    while (start <= line.size()) {
        const std::size_t comma = line.find(',', start);
        const std::string cell = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (cell.empty() || end != cell.c_str() + cell.size()) throw ParseError("bad number '" + cell + "'", line_no, start + 1);
        vals.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (vals.size() % 2 != 0) throw ParseError("odd number of values in complex row", line_no, 1);
    std::vector<cplx> row;
    for (std::size_t k = 0; k < vals.size(); k += 2) row.emplace_back(vals[k], vals[k + 1]);
    return row;
}

} // namespace detail

inline std::string to_binary(const Eigen::MatrixXcd& M, const Grid1D& g) {
    if (M.rows() != g.n() || M.cols() != g.n()) throw DomainError("matrix does not match grid");
    std::string out = detail::grid_header(g);
    for (int i = 0; i < g.n(); ++i)
        for (int j = 0; j < g.n(); ++j) {
            detail::put_f64(out, M(i, j).real());
            detail::put_f64(out, M(i, j).imag());
        }
    return out;
}

inline std::pair<Eigen::MatrixXcd, Grid1D> matrix_from_binary(const std::string& in) {
    std::size_t pos = 0;
    const Grid1D g = detail::read_grid_header(in, pos);
    Eigen::MatrixXcd M(g.n(), g.n());
    for (int i = 0; i < g.n(); ++i)
        for (int j = 0; j < g.n(); ++j) {
            const double re = detail::get_f64(in, pos);
            M(i, j) = cplx(re, detail::get_f64(in, pos));
        }
    if (pos != in.size()) throw Error("trailing bytes after matrix data");
    return {std::move(M), g};
}

inline std::string to_binary(const WaveFunction& psi) {
    std::string out = detail::grid_header(psi.grid);
    for (int i = 0; i < psi.grid.n(); ++i) {
        detail::put_f64(out, psi.samples(i).real());
        detail::put_f64(out, psi.samples(i).imag());
    }
    return out;
}

inline WaveFunction wavefunction_from_binary(const std::string& in) {
    std::size_t pos = 0;
    const Grid1D g = detail::read_grid_header(in, pos);
    Eigen::VectorXcd s(g.n());
    for (int i = 0; i < g.n(); ++i) {
        const double re = detail::get_f64(in, pos);
        s(i) = cplx(re, detail::get_f64(in, pos));
    }
    if (pos != in.size()) throw Error("trailing bytes after wavefunction data");
    return WaveFunction(g, std::move(s));
}

inline std::string to_csv(const Eigen::MatrixXcd& M, const Grid1D& g) {
    std::string out = detail::csv_grid_comment(g);
    for (int i = 0; i < M.rows(); ++i) {
        for (int j = 0; j < M.cols(); ++j) {
            if (j) out += ',';
            out += format_double(M(i, j).real()) + ',' + format_double(M(i, j).imag());
        }
        out += '\n';
    }
    return out;
}

inline std::pair<Eigen::MatrixXcd, Grid1D> matrix_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    const Grid1D g = detail::read_csv_preamble(in, line_no);
    Eigen::MatrixXcd M(g.n(), g.n());
    for (int i = 0; i < g.n(); ++i) {
        if (!detail::next_row(in, line, line_no)) throw ParseError("matrix CSV has too few rows", line_no + 1, 1);
        const auto row = detail::parse_csv_row(line, line_no);
        if (static_cast<int>(row.size()) != g.n()) throw ParseError("matrix CSV row has wrong length", line_no, 1);
        for (int j = 0; j < g.n(); ++j) M(i, j) = row[j];
    }
    return {std::move(M), g};
}

inline std::string to_csv(const WaveFunction& psi) {
    std::string out = detail::csv_grid_comment(psi.grid);
    for (int i = 0; i < psi.grid.n(); ++i)
        out += format_double(psi.samples(i).real()) + ',' + format_double(psi.samples(i).imag()) + '\n';
    return out;
}

inline WaveFunction wavefunction_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    const Grid1D g = detail::read_csv_preamble(in, line_no);
    Eigen::VectorXcd s(g.n());
    for (int i = 0; i < g.n(); ++i) {
        if (!detail::next_row(in, line, line_no)) throw ParseError("wavefunction CSV has too few rows", line_no + 1, 1);
        const auto row = detail::parse_csv_row(line, line_no);
        if (row.size() != 1) throw ParseError("wavefunction CSV row must hold one re,im pair", i + 2, 1);
        s(i) = row[0];
    }
    return WaveFunction(g, std::move(s));
}

} // namespace ordo::kernels
