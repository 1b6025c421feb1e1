#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ordo/core/error.hpp"
#include "ordo/core/rational.hpp"

namespace ordo::opalg {

/// Probability measure on [0, 1] selecting an averaged tau-rule.
///
/// `PointMass(1/2)` is Weyl, `Uniform` is Born-Jordan, `PointMass(0)` and
/// `PointMass(1)` are the standard and anti-standard orderings.
class TauMeasure {
public:
    struct PointMass {
        Rational tau;
    };
    struct Uniform {};
    struct Atom {
        Rational weight;
        Rational tau;
    };
    struct Mixture {
        std::vector<Atom> atoms;
    };
    using Variant = std::variant<PointMass, Uniform, Mixture>;

    static TauMeasure point_mass(Rational tau) {
        check_tau(tau);
        return TauMeasure(PointMass{std::move(tau)});
    }
    static TauMeasure weyl() { return point_mass(Rational(1, 2)); }
    static TauMeasure uniform() { return TauMeasure(Uniform{}); }

    /// Weights must be positive and sum to exactly one.
    static TauMeasure mixture(std::vector<Atom> atoms) {
        if (atoms.empty()) throw DomainError("mixture needs at least one atom");
        Rational total(0);
        for (const auto& a : atoms) {
            check_tau(a.tau);
            if (a.weight <= 0) throw DomainError("mixture weights must be positive");
            total += a.weight;
        }
        if (total != 1) throw DomainError("mixture weights must sum to 1, got " + to_string(total));
        return TauMeasure(Mixture{std::move(atoms)});
    }

    const Variant& variant() const { return v_; }
    bool is_uniform() const { return std::holds_alternative<Uniform>(v_); }

    /// Atoms of a discrete measure; empty for Uniform.
    std::vector<Atom> atoms() const {
        if (const auto* pm = std::get_if<PointMass>(&v_)) return {{Rational(1), pm->tau}};
        if (const auto* mx = std::get_if<Mixture>(&v_)) return mx->atoms;
        return {};
    }

    /// Pushforward under tau -> 1 - tau.
    TauMeasure reflect() const {
        if (is_uniform()) return *this;
        auto a = atoms();
        for (auto& at : a) at.tau = 1 - at.tau;
        if (std::holds_alternative<PointMass>(v_)) return point_mass(a.front().tau);
        return mixture(std::move(a));
    }

    Rational mean() const {
        if (is_uniform()) return Rational(1, 2);
        Rational m(0);
        for (const auto& a : atoms()) m += a.weight * a.tau;
        return m;
    }

    friend bool operator==(const TauMeasure& x, const TauMeasure& y) {
        if (x.v_.index() != y.v_.index()) return false;
        if (x.is_uniform()) return true;
        const auto ax = x.atoms();
        const auto ay = y.atoms();
        if (ax.size() != ay.size()) return false;
        for (std::size_t i = 0; i < ax.size(); ++i)
            if (ax[i].weight != ay[i].weight || ax[i].tau != ay[i].tau) return false;
        return true;
    }

private:
    explicit TauMeasure(Variant v) : v_(std::move(v)) {}

    static void check_tau(const Rational& tau) {
        if (tau < 0 || tau > 1) throw DomainError("tau must lie in [0, 1], got " + to_string(tau));
    }

    Variant v_;
};

/// Integral of (1 - tau)^m tau^(r - m) against the measure; exact.
inline Rational tau_moment(const TauMeasure& P, int m, int r) {
    if (m < 0 || m > r) throw DomainError("tau_moment requires 0 <= m <= r");
    if (P.is_uniform()) {
        // Beta(m + 1, r - m + 1)
        return factorial(m) * factorial(r - m) / factorial(r + 1);
    }
    Rational s(0);
    for (const auto& a : P.atoms()) s += a.weight * pow(1 - a.tau, m) * pow(a.tau, r - m);
    return s;
}

/// Cohen multiplier of the averaged rule at u = q0 p0 / hbar:
/// integral of exp(-i (tau - 1/2) u) dP(tau). Floating point.
inline std::complex<double> cohen_multiplier(const TauMeasure& P, double u) {
    if (P.is_uniform()) {
        const double h = 0.5 * u;
        if (std::abs(h) < 1e-4) return {1.0 - h * h / 6.0 + h * h * h * h / 120.0, 0.0};
        return {std::sin(h) / h, 0.0};
    }
    std::complex<double> s{0.0, 0.0};
    for (const auto& a : P.atoms()) {
        const double t = to_double(a.tau) - 0.5;
        s += to_double(a.weight) * std::exp(std::complex<double>(0.0, -t * u));
    }
    return s;
}

inline std::string to_string(const TauMeasure& P) {
    using ordo::to_string;
    if (P.is_uniform()) return "uniform";
    if (const auto* pm = std::get_if<TauMeasure::PointMass>(&P.variant())) return "tau:" + to_string(pm->tau);
    std::string s = "mix:";
    bool first = true;
    for (const auto& a : P.atoms()) {
        if (!first) s += ",";
        s += to_string(a.weight) + "@" + to_string(a.tau);
        first = false;
    }
    return s;
}

/// Accepts `uniform`/`bj`, `weyl`/`midpoint`, `left`, `right`, `tau:<r>`, and
/// `mix:<w>@<tau>,<w>@<tau>,...` with exact rationals or decimals.
inline TauMeasure parse_measure(std::string_view s) {
    if (s == "uniform" || s == "bj" || s == "born-jordan") return TauMeasure::uniform();
    if (s == "weyl" || s == "midpoint") return TauMeasure::weyl();
    if (s == "left") return TauMeasure::point_mass(Rational(0));
    if (s == "right") return TauMeasure::point_mass(Rational(1));
    if (s.rfind("tau:", 0) == 0) return TauMeasure::point_mass(parse_rational(s.substr(4), 4));
    if (s.rfind("mix:", 0) == 0) {
        std::vector<TauMeasure::Atom> atoms;
        std::size_t pos = 4;
        while (pos <= s.size()) {
            std::size_t end = s.find(',', pos);
            if (end == std::string_view::npos) end = s.size();
            const std::string_view item = s.substr(pos, end - pos);
            const std::size_t at = item.find('@');
            if (at == std::string_view::npos) throw ParseError("mixture atom must be <weight>@<tau>", 1, pos + 1);
            atoms.push_back({parse_rational(item.substr(0, at), pos), parse_rational(item.substr(at + 1), pos + at + 1)});
            if (end == s.size()) break;
            pos = end + 1;
        }
        return TauMeasure::mixture(std::move(atoms));
    }
    throw ParseError("unknown measure '" + std::string(s) + "'", 1, 1);
}

} // namespace ordo::opalg
