#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ordo/core/error.hpp"
#include "ordo/core/quadrature.hpp"
#include "ordo/kernels/position_function.hpp"
#include "ordo/opalg/symbol.hpp"

namespace ordo::kernels {

/// One separable piece a(p) * b(q) of a phase-space symbol. The momentum
/// factor is p^p_power when p_power >= 0, and the general `p_factor` when
/// p_power < 0.
struct SymbolTerm {
    int p_power = 0;
    std::function<double(double)> p_factor;
    PositionFunction q_factor;

    double momentum(double p) const {
        if (p_power < 0) return p_factor(p);
        double r = 1.0;
        for (int k = 0; k < p_power; ++k) r *= p;
        return r;
    }
};

/// Real classical symbol H(q, p) = sum_k a_k(p) b_k(q).
///
/// The declared p-degree is the largest monomial p-power, or -1 when some
/// momentum factor is not a monomial (then the symbol may grow arbitrarily).
class SymbolFunction {
public:
    SymbolFunction() = default;
    SymbolFunction(std::vector<SymbolTerm> terms, std::string id) : terms_(std::move(terms)), id_(std::move(id)) {}

    /// p^2 / 2m + V(q).
    static SymbolFunction standard(double m, PositionFunction V, std::string id = {}) {
        if (!(m > 0)) throw DomainError("mass must be positive");
        return SymbolFunction({{2, {}, PositionFunction::constant(0.5 / m)}, {0, {}, std::move(V)}}, std::move(id));
    }

    /// p^2 / 2m + u0(q) p + V(q).
    static SymbolFunction magnetic(double m, PositionFunction u0, PositionFunction V, std::string id = {}) {
        if (!(m > 0)) throw DomainError("mass must be positive");
        return SymbolFunction(
            {{2, {}, PositionFunction::constant(0.5 / m)}, {1, {}, std::move(u0)}, {0, {}, std::move(V)}}, std::move(id));
    }

    /// Position-only symbol V(q).
    static SymbolFunction potential(PositionFunction V, std::string id = {}) {
        return SymbolFunction({{0, {}, std::move(V)}}, std::move(id));
    }

    /// Polynomial symbol with real coefficients.
    static SymbolFunction from_poly(const opalg::PolySymbol& f, std::string id = {}) {
        if (!f.is_real()) throw DomainError("numeric symbols must have real coefficients");
        std::map<int, std::vector<double>> by_p;
        for (const auto& [mono, c] : f.terms()) {
            auto& coeffs = by_p[mono.p_power];
            if (static_cast<int>(coeffs.size()) <= mono.q_power) coeffs.resize(mono.q_power + 1, 0.0);
            coeffs[mono.q_power] = to_double(c.re);
        }
        std::vector<SymbolTerm> terms;
        for (auto& [r, coeffs] : by_p) terms.push_back({r, {}, PositionFunction::polynomial(std::move(coeffs))});
        return SymbolFunction(std::move(terms), id.empty() ? opalg::to_string(f) : std::move(id));
    }

    const std::vector<SymbolTerm>& terms() const { return terms_; }
    const std::string& id() const { return id_; }

    int p_degree() const {
        int d = 0;
        for (const auto& t : terms_) {
            if (t.p_power < 0) return -1;
            if (!t.q_factor.is_zero()) d = std::max(d, t.p_power);
        }
        return d;
    }

    /// True when every term depends on only one of q, p, i.e. H = T(p) + V(q).
    bool is_split() const {
        for (const auto& t : terms_)
            if (t.p_power != 0 && !t.q_factor.is_constant()) return false;
        return true;
    }

    double operator()(double q, double p) const {
        double h = 0.0;
        for (const auto& t : terms_) h += t.momentum(p) * t.q_factor(q);
        return h;
    }

    /// Measure-average of H((1 - tau) a + tau b, p).
    double averaged(double a, double b, double p, const MeasureRule& m) const {
        double h = 0.0;
        for (const auto& t : terms_) h += t.momentum(p) * t.q_factor.segment_average(a, b, m);
        return h;
    }

private:
    std::vector<SymbolTerm> terms_;
    std::string id_;
};

/// Segment average of a symbol along the straight line from q_A to q_B.
inline double average_symbol(const SymbolFunction& H, double q_A, double q_B, double p, const opalg::TauMeasure& P,
                             int quadrature_order = 32) {
    return H.averaged(q_A, q_B, p, measure_rule(P, quadrature_order));
}

} // namespace ordo::kernels
