#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ordo/core/error.hpp"
#include "ordo/core/quadrature.hpp"

namespace ordo::kernels {

/// Real function of position with first and second derivatives. Polynomial
/// functions keep their coefficients so that segment averages are exact.
class PositionFunction {
public:
    using Fn = std::function<double(double)>;

    /// The zero polynomial.
    PositionFunction() : polynomial_(true) {}

    /// c[0] + c[1] q + c[2] q^2 + ...
    static PositionFunction polynomial(std::vector<double> c, std::string id = {}) {
        while (!c.empty() && c.back() == 0.0) c.pop_back();
        PositionFunction f;
        f.coeffs_ = std::move(c);
        f.polynomial_ = true;
        f.id_ = std::move(id);
        return f;
    }

    static PositionFunction constant(double c) { return polynomial({c}); }

    static PositionFunction general(Fn f, Fn d1, Fn d2, std::string id = {}) {
        if (!f || !d1 || !d2) throw DomainError("general position function needs value and two derivatives");
        PositionFunction g(0);
        g.f_ = std::move(f);
        g.d1_ = std::move(d1);
        g.d2_ = std::move(d2);
        g.id_ = std::move(id);
        return g;
    }

    bool is_polynomial() const { return polynomial_; }
    const std::vector<double>& coefficients() const { return coeffs_; }
    const std::string& id() const { return id_; }

    bool is_constant() const { return polynomial_ && coeffs_.size() <= 1; }
    bool is_zero() const { return polynomial_ && coeffs_.empty(); }
    double constant_value() const { return coeffs_.empty() ? 0.0 : coeffs_[0]; }

    double operator()(double x) const { return polynomial_ ? horner(coeffs_, x) : f_(x); }

    double d1(double x) const {
        if (!polynomial_) return d1_(x);
        double acc = 0.0;
        for (std::size_t k = coeffs_.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * coeffs_[k];
        return acc;
    }

    double d2(double x) const {
        if (!polynomial_) return d2_(x);
        double acc = 0.0;
        for (std::size_t k = coeffs_.size(); k-- > 2;) acc = acc * x + static_cast<double>(k * (k - 1)) * coeffs_[k];
        return acc;
    }

    /// Measure-average of f along (1 - tau) a + tau b. Exact closed-form
    /// moments for polynomials under Uniform; quadrature/atoms otherwise.
    double segment_average(double a, double b, const MeasureRule& m) const {
        if (polynomial_ && m.exact_uniform) {
            // avg of x^k over the segment = sum_{j=0}^{k} a^j b^(k-j) / (k+1)
            double total = 0.0;
            for (std::size_t k = 0; k < coeffs_.size(); ++k) {
                if (coeffs_[k] == 0.0) continue;
                double s = 0.0, apow = 1.0;
                for (std::size_t j = 0; j <= k; ++j) {
                    s += apow * int_pow(b, k - j);
                    apow *= a;
                }
                total += coeffs_[k] * s / static_cast<double>(k + 1);
            }
            return total;
        }
        double total = 0.0;
        for (std::size_t k = 0; k < m.rule.size(); ++k) {
            const double t = m.rule.nodes[k];
            total += m.rule.weights[k] * (*this)((1.0 - t) * a + t * b);
        }
        return total;
    }

private:
    explicit PositionFunction(int) {}

    static double horner(const std::vector<double>& c, double x) {
        double acc = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
        return acc;
    }

    static double int_pow(double x, std::size_t e) {
        double r = 1.0;
        for (std::size_t i = 0; i < e; ++i) r *= x;
        return r;
    }

    std::vector<double> coeffs_;
    bool polynomial_ = false;
    Fn f_, d1_, d2_;
    std::string id_;
};

} // namespace ordo::kernels
