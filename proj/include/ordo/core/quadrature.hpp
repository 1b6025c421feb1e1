#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <string>
#include <vector>

#include "ordo/core/error.hpp"
#include "ordo/opalg/measure.hpp"

namespace ordo {

/// Nodes and weights of a quadrature rule on [0, 1]; weights sum to one.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

namespace detail {

template <int N>
QuadratureRule gauss_legendre_unit() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    QuadratureRule rule;
    // boost stores the non-negative half; node 0 appears once for odd N
    for (std::size_t k = x.size(); k-- > 0;) {
        if (x[k] == 0.0) continue;
        rule.nodes.push_back(0.5 * (1.0 - x[k]));
        rule.weights.push_back(0.5 * w[k]);
    }
    if (N % 2 == 1) {
        rule.nodes.push_back(0.5);
        rule.weights.push_back(0.5 * w[0]);
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k] == 0.0) continue;
        rule.nodes.push_back(0.5 * (1.0 + x[k]));
        rule.weights.push_back(0.5 * w[k]);
    }
    return rule;
}

} // namespace detail

/// Gauss-Legendre rule on [0, 1]. Supported orders: 4, 8, 16, 20, 32, 64.
inline QuadratureRule gauss_legendre(int order) {
    switch (order) {
    case 4: return detail::gauss_legendre_unit<4>();
    case 8: return detail::gauss_legendre_unit<8>();
    case 16: return detail::gauss_legendre_unit<16>();
    case 20: return detail::gauss_legendre_unit<20>();
    case 32: return detail::gauss_legendre_unit<32>();
    case 64: return detail::gauss_legendre_unit<64>();
    default: throw DomainError("unsupported Gauss-Legendre order " + std::to_string(order));
    }
}

/// Numeric realization of a tau measure: its atoms for discrete measures,
/// Gauss-Legendre nodes for Uniform. `exact_uniform` tells polynomial
/// integrands to use closed-form segment moments instead.
struct MeasureRule {
    QuadratureRule rule;
    bool exact_uniform = false;
};

inline MeasureRule measure_rule(const opalg::TauMeasure& P, int order = 32) {
    MeasureRule m;
    if (P.is_uniform()) {
        m.rule = gauss_legendre(order);
        m.exact_uniform = true;
        return m;
    }
    for (const auto& a : P.atoms()) {
        m.rule.nodes.push_back(to_double(a.tau));
        m.rule.weights.push_back(to_double(a.weight));
    }
    return m;
}

} // namespace ordo
