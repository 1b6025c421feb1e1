#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ordo/classical/potential.hpp"
#include "ordo/core/error.hpp"
#include "ordo/kernels/symbol_function.hpp"

namespace ordo::classical {

/// H(q, p) = p^2 / 2m + u0(q) p + V(q) with constant mass m.
struct HamiltonianSpec {
    double m = 1.0;
    std::optional<Potential> u0; ///< polynomial magnetic term; absent means u0 = 0
    Potential V;

    HamiltonianSpec() = default;
    HamiltonianSpec(double mass, Potential v, std::optional<Potential> magnetic = std::nullopt)
        : m(mass), u0(std::move(magnetic)), V(std::move(v)) {
        if (!(m > 0)) throw DomainError("mass must be positive");
        if (u0 && !u0->is_polynomial()) throw DomainError("magnetic term must be polynomial");
        if (u0 && u0->coefficients().empty()) u0.reset();
    }

    bool magnetic() const { return u0.has_value(); }

    template <class Real>
    Real u(const Real& q) const {
        return u0 ? u0->V(q) : Real(0);
    }
    template <class Real>
    Real du(const Real& q) const {
        return u0 ? u0->dV(q) : Real(0);
    }
    template <class Real>
    Real d2u(const Real& q) const {
        return u0 ? u0->d2V(q) : Real(0);
    }

    template <class Real>
    Real energy(const Real& q, const Real& p) const {
        return p * p / (2 * Real(m)) + u(q) * p + V.V(q);
    }

    kernels::SymbolFunction symbol() const {
        const std::string id = "H[m=" + format_double(m) + "," + V.id() + (u0 ? ",u0=" + u0->id() : "") + "]";
        if (u0) return kernels::SymbolFunction::magnetic(m, u0->as_function(), V.as_function(), id);
        return kernels::SymbolFunction::standard(m, V.as_function(), id);
    }

    std::string id() const { return symbol().id(); }
};

/// (dq/dt, dp/dt) = (p/m + u0(q), -u0'(q) p - V'(q)).
template <class Real>
std::pair<Real, Real> hamilton_rhs(const HamiltonianSpec& H, const Real& q, const Real& p) {
    return {p / Real(H.m) + H.u(q), -H.du(q) * p - H.V.dV(q)};
}

enum class RejectReason { PDegree, NonConstantMass, NonPositiveMass };

inline std::string to_string(RejectReason r) {
    switch (r) {
    case RejectReason::PDegree: return "p-degree";
    case RejectReason::NonConstantMass: return "non-constant-mass";
    case RejectReason::NonPositiveMass: return "non-positive-mass";
    }
    return "unknown";
}

struct Classification {
    bool accepted = false;
    std::optional<HamiltonianSpec> spec;
    std::optional<RejectReason> reason;
    std::string detail;
};

/// Accepts symbols of the form p^2/2m + u0(q) p + V(q) with constant m > 0;
/// rejects higher momentum powers and position-dependent p^2 coefficients.
inline Classification classify_hamiltonian(const kernels::SymbolFunction& H) {
    auto reject = [](RejectReason r, std::string why) {
        Classification c;
        c.reason = r;
        c.detail = std::move(why);
        return c;
    };
    std::map<int, std::vector<kernels::PositionFunction>> by_power;
    for (const auto& t : H.terms()) {
        if (t.q_factor.is_zero()) continue;
        if (t.p_power < 0) return reject(RejectReason::PDegree, "momentum dependence is not polynomial");
        if (t.p_power > 2)
            return reject(RejectReason::PDegree, "term with p^" + std::to_string(t.p_power) + " exceeds quadratic order");
        by_power[t.p_power].push_back(t.q_factor);
    }
    // sum the position factors of each momentum power
    auto combine = [](const std::vector<kernels::PositionFunction>& fs) -> kernels::PositionFunction {
        bool all_poly = true;
        for (const auto& f : fs) all_poly = all_poly && f.is_polynomial();
        if (all_poly) {
            std::vector<double> c;
            for (const auto& f : fs) {
                const auto& fc = f.coefficients();
                if (fc.size() > c.size()) c.resize(fc.size(), 0.0);
                for (std::size_t k = 0; k < fc.size(); ++k) c[k] += fc[k];
            }
            return kernels::PositionFunction::polynomial(std::move(c));
        }
        return kernels::PositionFunction::general(
            [fs](double x) { double s = 0; for (const auto& f : fs) s += f(x); return s; },
            [fs](double x) { double s = 0; for (const auto& f : fs) s += f.d1(x); return s; },
            [fs](double x) { double s = 0; for (const auto& f : fs) s += f.d2(x); return s; });
    };
    if (!by_power.count(2)) return reject(RejectReason::NonPositiveMass, "no p^2 term: the mass is infinite");
    const auto kin = combine(by_power[2]);
    if (!kin.is_polynomial() || kin.coefficients().size() > 1)
        return reject(RejectReason::NonConstantMass, "the p^2 coefficient depends on q");
    const double half_inverse_mass = kin.constant_value();
    if (!(half_inverse_mass > 0)) return reject(RejectReason::NonPositiveMass, "the p^2 coefficient must be positive");
    std::optional<Potential> u0;
    if (by_power.count(1)) {
        const auto u = combine(by_power[1]);
        if (!u.is_polynomial()) return reject(RejectReason::PDegree, "only polynomial magnetic terms are supported");
        u0 = Potential::polynomial(u.coefficients());
    }
    Potential V;
    if (by_power.count(0)) V = Potential::custom(combine(by_power[0]), "V[" + H.id() + "]");
    Classification c;
    c.accepted = true;
    c.spec = HamiltonianSpec(0.5 / half_inverse_mass, std::move(V), std::move(u0));
    return c;
}

} // namespace ordo::classical
