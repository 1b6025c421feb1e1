#pragma once

#include <boost/multiprecision/float128.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ordo/core/error.hpp"
#include "ordo/core/file_io.hpp"
#include "ordo/kernels/position_function.hpp"

namespace ordo::classical {

using quad = boost::multiprecision::float128;

/// Potential energy V(q) from the catalog. Polynomial variants (free,
/// linear, harmonic, quartic, poly) keep exact coefficients; `Custom` wraps an
/// arbitrary position function evaluated in double precision.
class Potential {
public:
    enum class Kind { Free, Linear, Harmonic, Quartic, Polynomial, Gaussian, Custom };

    Potential() : Potential(Kind::Free, {}, "free") {}

    static Potential free() { return Potential(); }

    /// Constant force F: V = -F q.
    static Potential linear(double F) { return Potential(Kind::Linear, {0.0, -F}, "linear:F=" + format_double(F)); }

    /// V = m omega^2 q^2 / 2 (the mass enters the coefficient).
    static Potential harmonic(double omega, double m) {
        if (!(m > 0)) throw DomainError("mass must be positive");
        Potential v(Kind::Harmonic, {0.0, 0.0, 0.5 * m * omega * omega}, "harmonic:omega=" + format_double(omega));
        v.params_ = {omega, m};
        return v;
    }

    /// V = lambda q^4.
    static Potential quartic(double lambda) {
        Potential v(Kind::Quartic, {0.0, 0.0, 0.0, 0.0, lambda}, "quartic:lambda=" + format_double(lambda));
        v.params_ = {lambda};
        return v;
    }

    /// V = c0 + c1 q + c2 q^2 + ...
    static Potential polynomial(std::vector<double> c) {
        std::string id = "poly:";
        for (std::size_t k = 0; k < c.size(); ++k) id += (k ? "," : "") + format_double(c[k]);
        return Potential(Kind::Polynomial, std::move(c), id);
    }

    /// V = V0 exp(-q^2 / (2 w^2)).
    static Potential gaussian(double V0, double w) {
        if (!(w > 0)) throw DomainError("gaussian width must be positive");
        Potential v(Kind::Gaussian, {}, "gauss:V0=" + format_double(V0) + ",w=" + format_double(w));
        v.params_ = {V0, w};
        return v;
    }

    static Potential custom(kernels::PositionFunction f, std::string id) {
        if (f.is_polynomial()) {
            Potential v = polynomial(f.coefficients());
            v.id_ = std::move(id);
            return v;
        }
        Potential v(Kind::Custom, {}, std::move(id));
        v.custom_ = std::move(f);
        return v;
    }

    Kind kind() const { return kind_; }
    const std::string& id() const { return id_; }
    bool is_polynomial() const { return kind_ != Kind::Gaussian && kind_ != Kind::Custom; }
    /// Coefficients c0, c1, ... for polynomial kinds (trailing zeros trimmed).
    const std::vector<double>& coefficients() const { return coeffs_; }
    const std::vector<double>& params() const { return params_; }

    /// True when V'' vanishes identically.
    bool is_affine() const { return is_polynomial() && coeffs_.size() <= 2; }

    template <class Real>
    Real V(const Real& q) const {
        return eval<Real>(q, 0);
    }
    template <class Real>
    Real dV(const Real& q) const {
        return eval<Real>(q, 1);
    }
    template <class Real>
    Real d2V(const Real& q) const {
        return eval<Real>(q, 2);
    }

    double operator()(double q) const { return V(q); }

    kernels::PositionFunction as_function() const {
        if (is_polynomial()) return kernels::PositionFunction::polynomial(coeffs_, id_);
        Potential self = *this;
        return kernels::PositionFunction::general([self](double q) { return self.V(q); },
                                                  [self](double q) { return self.dV(q); },
                                                  [self](double q) { return self.d2V(q); }, id_);
    }

private:
    Potential(Kind k, std::vector<double> c, std::string id) : kind_(k), coeffs_(std::move(c)), id_(std::move(id)) {
        while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
    }

    template <class Real>
    Real eval(const Real& q, int derivative) const {
        using std::exp;
        if (is_polynomial()) {
            Real acc(0);
            for (std::size_t k = coeffs_.size(); k-- > static_cast<std::size_t>(derivative);) {
                Real c(coeffs_[k]);
                for (int d = 0; d < derivative; ++d) c *= static_cast<int>(k) - d;
                acc = acc * q + c;
            }
            return acc;
        }
        if (kind_ == Kind::Gaussian) {
            const Real V0(params_[0]), w(params_[1]);
            const Real w2 = w * w;
            const Real g = V0 * exp(-q * q / (2 * w2));
            if (derivative == 0) return g;
            if (derivative == 1) return -q / w2 * g;
            return (q * q / w2 - 1) / w2 * g;
        }
        const double x = static_cast<double>(q);
        if (derivative == 0) return Real(custom_(x));
        if (derivative == 1) return Real(custom_.d1(x));
        return Real(custom_.d2(x));
    }

    Kind kind_;
    std::vector<double> coeffs_;
    std::vector<double> params_;
    std::string id_;
    kernels::PositionFunction custom_;
};

namespace detail {

/// Splits "a=1,b=2" or "1,2" into values, enforcing the expected keys in order.
inline std::vector<double> parse_params(std::string_view body, const std::vector<std::string>& keys, std::size_t offset,
                                        bool variadic) {
    std::vector<double> out;
    std::size_t i = 0;
    std::size_t index = 0;
    while (i <= body.size()) {
        std::size_t comma = body.find(',', i);
        if (comma == std::string_view::npos) comma = body.size();
        std::string_view item = body.substr(i, comma - i);
        const std::size_t col = offset + i + 1;
        const std::size_t eq = item.find('=');
        if (eq != std::string_view::npos) {
            const std::string key(item.substr(0, eq));
            if (variadic || index >= keys.size() || key != keys[index])
                throw ParseError("unexpected parameter '" + key + "'", 1, col);
            item = item.substr(eq + 1);
        }
        if (item.empty()) throw ParseError("missing value", 1, col);
        const std::string text(item);
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size()) throw ParseError("bad number '" + text + "'", 1, col);
        out.push_back(v);
        ++index;
        if (comma == body.size()) break;
        i = comma + 1;
    }
    if (!variadic && out.size() != keys.size())
        throw ParseError("expected " + std::to_string(keys.size()) + " parameter(s)", 1, offset + 1);
    return out;
}

} // namespace detail

/// Parses `free`, `linear:F=2.0`, `harmonic:omega=1.0`, `quartic:lambda=0.1`,
/// `poly:1,0,0.5`, `gauss:V0=1,w=0.5`. Parameter names are optional
/// (`linear:2.0`). The mass is needed for the harmonic coefficient.
inline Potential parse_potential(std::string_view spec, double m = 1.0) {
    const std::size_t colon = spec.find(':');
    const std::string_view kind = spec.substr(0, colon);
    const std::string_view body = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
    const std::size_t off = colon == std::string_view::npos ? spec.size() : colon + 1;
    if (kind == "free") {
        if (colon != std::string_view::npos) throw ParseError("free takes no parameters", 1, off);
        return Potential::free();
    }
    if (colon == std::string_view::npos) throw ParseError("unknown potential '" + std::string(spec) + "'", 1, 1);
    if (kind == "linear") return Potential::linear(detail::parse_params(body, {"F"}, off, false)[0]);
    if (kind == "harmonic") return Potential::harmonic(detail::parse_params(body, {"omega"}, off, false)[0], m);
    if (kind == "quartic") return Potential::quartic(detail::parse_params(body, {"lambda"}, off, false)[0]);
    if (kind == "poly") return Potential::polynomial(detail::parse_params(body, {}, off, true));
    if (kind == "gauss") {
        const auto p = detail::parse_params(body, {"V0", "w"}, off, false);
        return Potential::gaussian(p[0], p[1]);
    }
    throw ParseError("unknown potential kind '" + std::string(kind) + "'", 1, 1);
}

/// Magnetic term u0(q), restricted to polynomials. Accepts `u0=poly:...` or `poly:...`.
inline Potential parse_magnetic(std::string_view spec) {
    std::size_t off = 0;
    if (spec.substr(0, 3) == "u0=") {
        spec.remove_prefix(3);
        off = 3;
    }
    if (spec.substr(0, 5) != "poly:") throw ParseError("magnetic term must be 'poly:c0,c1,...'", 1, off + 1);
    return Potential::polynomial(detail::parse_params(spec.substr(5), {}, off + 5, true));
}

} // namespace ordo::classical
