#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ordo/core/error.hpp"
#include "ordo/core/parallel.hpp"
#include "ordo/core/quadrature.hpp"
#include "ordo/kernels/grid.hpp"
#include "ordo/kernels/symbol_function.hpp"
#include "ordo/opalg/measure.hpp"

namespace ordo::kernels {

/// How the straight segment between two grid points is drawn.
enum class SegmentGeometry {
    Direct,   ///< from q_a to q_b as given
    Periodic, ///< from q_a to q_a + wrap(q_b - q_a), the minimum-image displacement
};

struct KernelOptions {
    int quadrature_order = 32;
    /// When set, momentum sums keep only |p| <= p_cutoff. Required for
    /// symbols with p-degree above two.
    std::optional<double> p_cutoff;
    SegmentGeometry geometry = SegmentGeometry::Direct;
};

/// Position-representation matrix of an operator on a grid. Entries already
/// include the dq integration weight, so applying the operator to a sampled
/// wavefunction is a plain matrix-vector product.
struct KernelMatrix {
    Eigen::MatrixXcd entries;
    Grid1D grid;
    std::string symbol_id;
    std::string measure_id;

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const { return entries * v; }
    WaveFunction apply(const WaveFunction& psi) const { return WaveFunction(grid, entries * psi.samples); }

    double hermiticity_defect() const { return (entries - entries.adjoint()).norm() / entries.norm(); }
};

namespace detail {

/// Table of e^{2 pi i m / n} for m = 0..n-1, so that every phase in a
/// momentum sum is looked up by an exact integer index.
inline std::vector<cplx> unit_roots(int n) {
    std::vector<cplx> w(n);
    for (int m = 0; m < n; ++m) w[m] = std::polar(1.0, 2.0 * std::numbers::pi * m / n);
    return w;
}

inline int mod(long long a, int n) {
    const long long r = a % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

inline std::vector<char> momentum_mask(const Grid1D& g, const std::optional<double>& cutoff) {
    std::vector<char> keep(g.n(), 1);
    if (cutoff)
        for (int k = 0; k < g.n(); ++k) keep[k] = std::abs(g.p(k)) <= *cutoff;
    return keep;
}

/// A(d) = (1/n) sum_k a_k e^{2 pi i j_k d / n} for d = 0..n-1, where j_k is
/// the signed momentum index of slot k.
inline std::vector<cplx> momentum_transform(const Grid1D& g, const std::vector<cplx>& a) {
    const int n = g.n();
    const auto w = unit_roots(n);
    std::vector<cplx> out(n);
    for (int d = 0; d < n; ++d) {
        cplx s = 0.0;
        for (int k = 0; k < n; ++k) s += a[k] * w[mod(static_cast<long long>(g.momentum_index(k)) * d, n)];
        out[d] = s / static_cast<double>(n);
    }
    return out;
}

inline void check_p_degree(const SymbolFunction& f, const KernelOptions& opt) {
    const int deg = f.p_degree();
    if ((deg < 0 || deg > 2) && !opt.p_cutoff)
        throw UnsupportedSymbol("symbol has p-degree " + (deg < 0 ? std::string("unbounded") : std::to_string(deg)) +
                                " > 2; supply an explicit momentum cutoff");
}

/// Far endpoint of the segment starting at a and heading to b.
inline double segment_end(const Grid1D& g, double a, double b, SegmentGeometry geo) {
    return geo == SegmentGeometry::Periodic ? a + g.wrap(b - a) : b;
}

/// Splits a symbol with is_split() into its kinetic part T(p) and potential part.
struct SplitSymbol {
    std::vector<const SymbolTerm*> kinetic;   // p-dependent, constant in q
    std::vector<const SymbolTerm*> potential; // p-independent
    double T(double p) const {
        double t = 0.0;
        for (const auto* term : kinetic) t += term->momentum(p) * term->q_factor.constant_value();
        return t;
    }
};

inline SplitSymbol split(const SymbolFunction& H) {
    SplitSymbol s;
    for (const auto& t : H.terms()) (t.p_power == 0 ? s.potential : s.kinetic).push_back(&t);
    return s;
}

} // namespace detail

/// Matrix of the P-averaged tau-quantization of f:
/// K(i, j) = (1/n) sum_p fbar(q_i, q_j, p) e^{i p (q_i - q_j)/hbar},
/// where fbar averages f((1 - tau) q_i + tau q_j, p) over P.
inline KernelMatrix kernel_matrix(const SymbolFunction& f, const Grid1D& g, const opalg::TauMeasure& P,
                                  const KernelOptions& opt = {}) {
    detail::check_p_degree(f, opt);
    const int n = g.n();
    const MeasureRule mr = measure_rule(P, opt.quadrature_order);
    const auto keep = detail::momentum_mask(g, opt.p_cutoff);
    KernelMatrix K{Eigen::MatrixXcd::Zero(n, n), g, f.id(), opalg::to_string(P)};
    for (const auto& term : f.terms()) {
        if (term.q_factor.is_zero()) continue;
        std::vector<cplx> A;
        const bool delta = term.p_power == 0 && !opt.p_cutoff;
        if (!delta) {
            std::vector<cplx> a(n);
            for (int k = 0; k < n; ++k) a[k] = keep[k] ? term.momentum(g.p(k)) : 0.0;
            A = detail::momentum_transform(g, a);
        }
        parallel_for(n, [&](std::size_t ii) {
            const int i = static_cast<int>(ii);
            for (int j = 0; j < n; ++j) {
                if (delta && i != j) continue;
                const double a = g.q(i);
                const double b = detail::segment_end(g, a, g.q(j), opt.geometry);
                const double avg = term.q_factor.is_constant() ? term.q_factor.constant_value()
                                                               : term.q_factor.segment_average(a, b, mr);
                K.entries(i, j) += (delta ? cplx(1.0) : A[detail::mod(i - j, n)]) * avg;
            }
        });
    }
    return K;
}

/// Spectral matrix of p^2/2m: the Fourier multiplier on the centered momentum grid.
inline KernelMatrix kinetic_matrix(const Grid1D& g, double m) {
    if (!(m > 0)) throw DomainError("mass must be positive");
    const int n = g.n();
    std::vector<cplx> a(n);
    for (int k = 0; k < n; ++k) a[k] = g.p(k) * g.p(k) / (2.0 * m);
    const auto A = detail::momentum_transform(g, a);
    KernelMatrix K{Eigen::MatrixXcd(n, n), g, "p^2/2m", "any"};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) K.entries(i, j) = A[detail::mod(i - j, n)];
    return K;
}

/// Short-time propagator matrix
/// K(i, j) = (1/n) sum_p exp{(i/hbar)(p (q_i - q_j) - Hbar(q_j, q_i, p) dt)},
/// with the segment running from the source point q_j to the target q_i.
inline KernelMatrix short_time_kernel(const SymbolFunction& H, const Grid1D& g, double dt, const opalg::TauMeasure& P,
                                      const KernelOptions& opt = {}) {
    if (!(dt > 0)) throw DomainError("dt must be positive");
    detail::check_p_degree(H, opt);
    const int n = g.n();
    const double hbar = g.hbar();
    const MeasureRule mr = measure_rule(P, opt.quadrature_order);
    const auto keep = detail::momentum_mask(g, opt.p_cutoff);
    KernelMatrix K{Eigen::MatrixXcd(n, n), g, H.id(), opalg::to_string(P)};

    if (H.is_split()) {
        const auto parts = detail::split(H);
        std::vector<cplx> a(n);
        for (int k = 0; k < n; ++k) a[k] = keep[k] ? std::polar(1.0, -parts.T(g.p(k)) * dt / hbar) : 0.0;
        const auto A = detail::momentum_transform(g, a);
        parallel_for(n, [&](std::size_t ii) {
            const int i = static_cast<int>(ii);
            for (int j = 0; j < n; ++j) {
                const double src = g.q(j);
                const double dst = detail::segment_end(g, src, g.q(i), opt.geometry);
                double vbar = 0.0;
                for (const auto* t : parts.potential) vbar += t->q_factor.segment_average(src, dst, mr);
                K.entries(i, j) = A[detail::mod(i - j, n)] * std::polar(1.0, -vbar * dt / hbar);
            }
        });
        return K;
    }

    const auto w = detail::unit_roots(n);
    const auto& terms = H.terms();
    std::vector<std::vector<double>> mom(terms.size(), std::vector<double>(n));
    for (std::size_t t = 0; t < terms.size(); ++t)
        for (int k = 0; k < n; ++k) mom[t][k] = terms[t].momentum(g.p(k));
    parallel_for(n, [&](std::size_t ii) {
        const int i = static_cast<int>(ii);
        std::vector<double> avg(terms.size());
        for (int j = 0; j < n; ++j) {
            const double src = g.q(j);
            const double dst = detail::segment_end(g, src, g.q(i), opt.geometry);
            for (std::size_t t = 0; t < terms.size(); ++t) avg[t] = terms[t].q_factor.segment_average(src, dst, mr);
            cplx s = 0.0;
            for (int k = 0; k < n; ++k) {
                if (!keep[k]) continue;
                double h = 0.0;
                for (std::size_t t = 0; t < terms.size(); ++t) h += mom[t][k] * avg[t];
                s += w[detail::mod(static_cast<long long>(g.momentum_index(k)) * (i - j), n)] *
                     std::polar(1.0, -h * dt / hbar);
            }
            K.entries(i, j) = s / static_cast<double>(n);
        }
    });
    return K;
}

/// Matrix of the averaged bounded symbol
/// F(i, j) = (1/n) sum_p [int exp(-i delta H((1 - tau) q_j + tau q_i, p)/hbar) P(dtau)] e^{i p (q_i - q_j)/hbar}.
/// The exponential is averaged, not the exponent, so this is the quantized
/// symbol e^{-i delta H/hbar} used by the Chernoff iteration.
inline KernelMatrix exp_symbol_kernel(const SymbolFunction& H, const Grid1D& g, double delta, const opalg::TauMeasure& P,
                                      const KernelOptions& opt = {}) {
    if (!(delta >= 0)) throw DomainError("time step must be non-negative");
    const int n = g.n();
    const double hbar = g.hbar();
    // the exponential is not polynomial: always average by nodes/atoms
    MeasureRule mr = measure_rule(P, opt.quadrature_order);
    mr.exact_uniform = false;
    const auto keep = detail::momentum_mask(g, opt.p_cutoff);
    KernelMatrix K{Eigen::MatrixXcd(n, n), g, "exp(-i dt " + H.id() + ")", opalg::to_string(P)};
    const auto& nodes = mr.rule.nodes;
    const auto& weights = mr.rule.weights;

    if (H.is_split()) {
        const auto parts = detail::split(H);
        std::vector<cplx> a(n);
        for (int k = 0; k < n; ++k) a[k] = keep[k] ? std::polar(1.0, -parts.T(g.p(k)) * delta / hbar) : 0.0;
        const auto A = detail::momentum_transform(g, a);
        parallel_for(n, [&](std::size_t ii) {
            const int i = static_cast<int>(ii);
            for (int j = 0; j < n; ++j) {
                const double src = g.q(j);
                const double dst = detail::segment_end(g, src, g.q(i), opt.geometry);
                cplx W = 0.0;
                for (std::size_t k = 0; k < nodes.size(); ++k) {
                    const double x = (1.0 - nodes[k]) * src + nodes[k] * dst;
                    double v = 0.0;
                    for (const auto* t : parts.potential) v += t->q_factor(x);
                    W += weights[k] * std::polar(1.0, -v * delta / hbar);
                }
                K.entries(i, j) = A[detail::mod(i - j, n)] * W;
            }
        });
        return K;
    }

    const auto w = detail::unit_roots(n);
    const auto& terms = H.terms();
    parallel_for(n, [&](std::size_t ii) {
        const int i = static_cast<int>(ii);
        for (int j = 0; j < n; ++j) {
            const double src = g.q(j);
            const double dst = detail::segment_end(g, src, g.q(i), opt.geometry);
            cplx s = 0.0;
            for (int k = 0; k < n; ++k) {
                if (!keep[k]) continue;
                const double p = g.p(k);
                cplx avg = 0.0;
                for (std::size_t a = 0; a < nodes.size(); ++a) {
                    const double x = (1.0 - nodes[a]) * src + nodes[a] * dst;
                    double h = 0.0;
                    for (const auto& t : terms) h += t.momentum(p) * t.q_factor(x);
                    avg += weights[a] * std::polar(1.0, -h * delta / hbar);
                }
                s += w[detail::mod(static_cast<long long>(g.momentum_index(k)) * (i - j), n)] * avg;
            }
            K.entries(i, j) = s / static_cast<double>(n);
        }
    });
    return K;
}

/// Pseudo-differential application with an energy cutoff:
/// (H psi)(q_i) = (1/n) sum_j sum_p Hbar(q_j, q_i, p) 1{|Hbar| <= E} e^{i p (q_i - q_j)/hbar} psi(q_j).
/// E = +infinity disables the cutoff.
inline WaveFunction apply_pseudodiff(const SymbolFunction& H, const opalg::TauMeasure& P, const WaveFunction& psi,
                                     double E, const KernelOptions& opt = {}) {
    if (E < 0 || std::isnan(E)) throw DomainError("energy cutoff must be non-negative");
    const Grid1D& g = psi.grid;
    const int n = g.n();
    const MeasureRule mr = measure_rule(P, opt.quadrature_order);
    const auto w = detail::unit_roots(n);
    const auto& terms = H.terms();
    std::vector<std::vector<double>> mom(terms.size(), std::vector<double>(n));
    for (std::size_t t = 0; t < terms.size(); ++t)
        for (int k = 0; k < n; ++k) mom[t][k] = terms[t].momentum(g.p(k));
    Eigen::VectorXcd out(n);
    parallel_for(n, [&](std::size_t ii) {
        const int i = static_cast<int>(ii);
        std::vector<double> avg(terms.size());
        cplx acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double src = g.q(j);
            const double dst = detail::segment_end(g, src, g.q(i), opt.geometry);
            for (std::size_t t = 0; t < terms.size(); ++t) avg[t] = terms[t].q_factor.segment_average(src, dst, mr);
            cplx s = 0.0;
            for (int k = 0; k < n; ++k) {
                double h = 0.0;
                for (std::size_t t = 0; t < terms.size(); ++t) h += mom[t][k] * avg[t];
                if (std::abs(h) > E) continue;
                s += h * w[detail::mod(static_cast<long long>(g.momentum_index(k)) * (i - j), n)];
            }
            acc += s * psi.samples(j);
        }
        out(i) = acc / static_cast<double>(n);
    });
    return WaveFunction(g, std::move(out));
}

/// Number of (target, source, momentum) grid triples kept by the cutoff
/// indicator 1{|Hbar| <= E}; non-decreasing in E by construction.
inline std::size_t cutoff_retained_count(const SymbolFunction& H, const opalg::TauMeasure& P, const Grid1D& g, double E,
                                         const KernelOptions& opt = {}) {
    const int n = g.n();
    const MeasureRule mr = measure_rule(P, opt.quadrature_order);
    std::size_t count = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double src = g.q(j);
            const double dst = detail::segment_end(g, src, g.q(i), opt.geometry);
            for (int k = 0; k < n; ++k) count += std::abs(H.averaged(src, dst, g.p(k), mr)) <= E;
        }
    return count;
}

} // namespace ordo::kernels
