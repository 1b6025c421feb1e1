#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ordo/classical/hamiltonian.hpp"
#include "ordo/core/error.hpp"

namespace ordo::classical {

/// Sampled trajectory over duration eps on the uniform grid tau_i = i/N.
template <class Real>
struct PhasePath {
    Real eps;
    Real q_A, q_B;
    std::vector<Real> tau, q, p;
    int iterations = 0; ///< shooting iterations used (0 for plain IVP paths)

    std::size_t steps() const { return q.size() - 1; }
    const Real& q_end() const { return q.back(); }
    const Real& p_end() const { return p.back(); }
    const Real& p_start() const { return p.front(); }
};

namespace detail {

template <class Real>
bool finite(const Real& x) {
    using std::isfinite;
    return isfinite(x);
}

} // namespace detail

/// Classical fixed-step RK4 in t. eps = 0 returns the initial point.
template <class Real>
PhasePath<Real> integrate_ivp(const HamiltonianSpec& H, const Real& q_A, const Real& p_A, const Real& eps, int n_steps) {
    if (n_steps < 16) throw DomainError("integrate_ivp requires at least 16 steps");
    if (eps < 0) throw DomainError("duration must be non-negative");
    PhasePath<Real> path{eps, q_A, q_A, {}, {}, {}};
    if (eps == 0) {
        path.tau = {Real(0)};
        path.q = {q_A};
        path.p = {p_A};
        return path;
    }
    path.tau.resize(n_steps + 1);
    path.q.resize(n_steps + 1);
    path.p.resize(n_steps + 1);
    const Real h = eps / n_steps;
    Real q = q_A, p = p_A;
    path.tau[0] = 0;
    path.q[0] = q;
    path.p[0] = p;
    for (int k = 0; k < n_steps; ++k) {
        const auto [k1q, k1p] = hamilton_rhs(H, q, p);
        const auto [k2q, k2p] = hamilton_rhs(H, Real(q + h / 2 * k1q), Real(p + h / 2 * k1p));
        const auto [k3q, k3p] = hamilton_rhs(H, Real(q + h / 2 * k2q), Real(p + h / 2 * k2p));
        const auto [k4q, k4p] = hamilton_rhs(H, Real(q + h * k3q), Real(p + h * k3p));
        q += h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q);
        p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
        if (!detail::finite(q) || !detail::finite(p))
            throw NumericOverflow("trajectory diverged at step " + std::to_string(k + 1));
        path.tau[k + 1] = Real(k + 1) / n_steps;
        path.q[k + 1] = q;
        path.p[k + 1] = p;
    }
    path.q_B = q;
    return path;
}

/// Initial momentum predicted by the secular expansion:
/// m (q_B - q_A)/eps + pi_0(0) + pi_1(0) eps with pi_0(0) = -m u0(q_A).
template <class Real>
Real secular_initial_momentum(const HamiltonianSpec& H, const Real& q_A, const Real& q_B, const Real& eps) {
    const Real m(H.m);
    Real p0 = m * (q_B - q_A) / eps - m * H.u(q_A);
    const Real dq = q_B - q_A;
    if (dq != 0) {
        // pi_1(0) = (w(q_A) - avg w)/dq with w = m u0^2/2 - V; a Simpson
        // average is plenty since this only seeds the iteration
        auto w = [&](const Real& x) { return m * H.u(x) * H.u(x) / 2 - H.V.V(x); };
        const int n = 16;
        Real avg(0);
        for (int k = 0; k <= n; ++k) {
            const Real t = Real(k) / n;
            const Real weight = (k == 0 || k == n) ? Real(1) : (k % 2 ? Real(4) : Real(2));
            avg += weight * w(Real((1 - t) * q_A + t * q_B));
        }
        avg /= 3 * n;
        p0 += (w(q_A) - avg) / dq * eps;
    }
    return p0;
}

/// Shooting on p_A with secant updates until |q(eps) - q_B| <= tol.
template <class Real>
PhasePath<Real> solve_bvp(const HamiltonianSpec& H, const Real& q_A, const Real& q_B, const Real& eps, const Real& tol,
                          int n_steps = 256, int max_iterations = 60) {
    using std::abs;
    if (!(eps > 0)) throw DomainError("BVP duration must be positive");
    if (!(tol > 0)) throw DomainError("BVP tolerance must be positive");
    const Real m(H.m);
    // free-flight sensitivity dq(eps)/dp_A = eps/m sets the conjugate-point scale
    const Real free_jacobian = eps / m;

    // Past the first conjugate time the endpoint map dq_B/dp_A has turned
    // negative; such a path is not the short-time branch the caller wants.
    auto accept = [&](PhasePath<Real>& path, const Real& p) {
        const Real dp = (abs(p) > 1 ? abs(p) : Real(1)) * Real(1e-10);
        const Real jq = (integrate_ivp(H, q_A, p + dp, eps, n_steps).q_end() - path.q_end()) / dp;
        if (!(jq > 0))
            throw ConjugatePoint("endpoint map dq_B/dp_A = " + std::to_string(static_cast<double>(jq)) +
                                 " is not positive: eps lies beyond the first conjugate time");
        path.q_B = q_B;
    };

    Real p0 = secular_initial_momentum(H, q_A, q_B, eps);
    PhasePath<Real> path = integrate_ivp(H, q_A, p0, eps, n_steps);
    Real r0 = path.q_end() - q_B;
    if (abs(r0) <= tol) {
        accept(path, p0);
        return path;
    }
    Real p1 = p0 - r0 / free_jacobian;
    for (int it = 1; it <= max_iterations; ++it) {
        path = integrate_ivp(H, q_A, p1, eps, n_steps);
        const Real r1 = path.q_end() - q_B;
        if (abs(r1) <= tol) {
            accept(path, p1);
            path.iterations = it;
            return path;
        }
        const Real jac = (r1 - r0) / (p1 - p0);
        if (abs(jac) < Real(1e-9) * free_jacobian)
            throw ConjugatePoint("endpoint map is singular (dq_B/dp_A = " + std::to_string(static_cast<double>(jac)) +
                                 "): eps is at or beyond a conjugate time");
        const Real p2 = p1 - r1 / jac;
        p0 = p1;
        r0 = r1;
        p1 = p2;
        if (p1 == p0) break;
    }
    throw NoConvergence("shooting did not reach tolerance " + std::to_string(static_cast<double>(tol)) + " within " +
                        std::to_string(max_iterations) + " iterations");
}

/// S = int (p dq/dt - H) dt by composite Simpson on the path samples.
/// Odd sample counts use Simpson 3/8 on the last three intervals.
template <class Real>
Real action_along(const PhasePath<Real>& path, const HamiltonianSpec& H) {
    const std::size_t N = path.steps();
    if (N < 2) return Real(0);
    const Real h = path.eps / N;
    std::vector<Real> L(N + 1);
    for (std::size_t k = 0; k <= N; ++k) {
        const auto [qdot, pdot] = hamilton_rhs(H, path.q[k], path.p[k]);
        (void)pdot;
        L[k] = path.p[k] * qdot - H.energy(path.q[k], path.p[k]);
    }
    auto simpson = [&](std::size_t a, std::size_t b) {
        Real s = L[a] + L[b];
        for (std::size_t k = a + 1; k < b; ++k) s += ((k - a) % 2 ? 4 : 2) * L[k];
        return s * h / 3;
    };
    if (N % 2 == 0) return simpson(0, N);
    if (N < 3) return (L[0] + L[1]) * h / 2;
    const Real tail = 3 * h / 8 * (L[N - 3] + 3 * L[N - 2] + 3 * L[N - 1] + L[N]);
    return (N > 3 ? simpson(0, N - 3) : Real(0)) + tail;
}

/// Action corrected to first order for a residual endpoint miss:
/// S - p_B (q(eps) - q_B).
template <class Real>
Real endpoint_corrected_action(const PhasePath<Real>& path, const HamiltonianSpec& H, const Real& q_B) {
    return action_along(path, H) - path.p_end() * (path.q_end() - q_B);
}

enum class ExactKind { Free, Linear, Harmonic };

/// Closed-form classical actions: free m dq^2/(2 eps); constant force F
/// adds F (q_A + q_B) eps/2 - F^2 eps^3/(24 m); harmonic
/// m omega ((q_A^2 + q_B^2) cos(omega eps) - 2 q_A q_B) / (2 sin(omega eps)).
template <class Real>
Real exact_action(ExactKind kind, const Real& m, const Real& param, const Real& q_A, const Real& q_B, const Real& eps) {
    using std::cos;
    using std::sin;
    using std::abs;
    const Real dq = q_B - q_A;
    switch (kind) {
    case ExactKind::Free: return m * dq * dq / (2 * eps);
    case ExactKind::Linear:
        return m * dq * dq / (2 * eps) + param * (q_A + q_B) * eps / 2 - param * param * eps * eps * eps / (24 * m);
    case ExactKind::Harmonic: {
        const Real w = param;
        if (w == 0) return m * dq * dq / (2 * eps);
        const Real s = sin(w * eps);
        if (abs(s) < Real(1e-12)) throw ConjugatePoint("sin(omega eps) = 0: conjugate point");
        return m * w * ((q_A * q_A + q_B * q_B) * cos(w * eps) - 2 * q_A * q_B) / (2 * s);
    }
    }
    throw DomainError("unknown exact-action kind");
}

/// Closed-form family of a Hamiltonian, if it has one.
inline std::optional<ExactKind> exact_kind(const HamiltonianSpec& H) {
    if (H.magnetic()) return std::nullopt;
    switch (H.V.kind()) {
    case Potential::Kind::Free: return ExactKind::Free;
    case Potential::Kind::Linear: return ExactKind::Linear;
    case Potential::Kind::Harmonic: return ExactKind::Harmonic;
    default: return std::nullopt;
    }
}

/// The parameter exact_action expects: F for Linear, omega for Harmonic.
inline double exact_param(const HamiltonianSpec& H) {
    switch (H.V.kind()) {
    case Potential::Kind::Linear: return H.V.coefficients().size() > 1 ? -H.V.coefficients()[1] : 0.0;
    case Potential::Kind::Harmonic: return H.V.params()[0];
    default: return 0.0;
    }
}

} // namespace ordo::classical
