#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "ordo/classical/hamiltonian.hpp"
#include "ordo/core/error.hpp"
#include "ordo/core/quadrature.hpp"

namespace ordo::classical {

/// Average of f over the straight segment from q_A to q_B. Gauss-Legendre
/// of order 64, which is exact (to rounding) for polynomials up to degree 127.
inline double path_average(const std::function<double(double)>& f, double q_A, double q_B) {
    static const QuadratureRule rule = gauss_legendre(64);
    if (q_A == q_B) return f(q_A);
    double s = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) s += rule.weights[k] * f((1 - rule.nodes[k]) * q_A + rule.nodes[k] * q_B);
    return s;
}

/// Composite Simpson mean over [0, 1] of samples on a uniform grid with an
/// even number of intervals.
inline double grid_mean(const std::vector<double>& f) {
    const std::size_t N = f.size() - 1;
    if (N < 2 || N % 2 != 0) throw DomainError("grid_mean needs an even number of intervals");
    double s = f.front() + f.back();
    for (std::size_t k = 1; k < N; ++k) s += (k % 2 ? 4.0 : 2.0) * f[k];
    return s / (3.0 * N);
}

/// Secular-expansion profiles of the two-point trajectory,
/// q = q_lin + sum eps^n chi_n, p = pi_{-1}/eps + sum eps^n pi_n,
/// sampled on tau_i = i/N.
struct SecularProfile {
    double m = 1, q_A = 0, q_B = 0;
    double pi_minus1 = 0;
    std::vector<double> tau;
    std::vector<double> pi0, pi1, pi2, pi3;
    std::vector<double> chi1, chi2, chi3, chi4;
    bool magnetic = false;

    /// Profiles that vanish identically by construction (u0 absent: pi0, pi2, chi1, chi3).
    bool vanishes(const std::string& name) const {
        return !magnetic && (name == "pi0" || name == "pi2" || name == "chi1" || name == "chi3");
    }

    double q_lin(double t) const { return (1 - t) * q_A + t * q_B; }
};

namespace detail {

/// w(q) = m u0(q)^2/2 - V(q); pi_1 = (w(q_lin) - avg w)/dq.
inline double w_of(const HamiltonianSpec& H, double q) {
    const double u = H.u(q);
    return H.m * u * u / 2 - H.V.V(q);
}

} // namespace detail

/// Computes pi_0..pi_3 and chi_1..chi_4.
///
/// pi_0 = -m u0(q_lin) and pi_1 = (w(q_lin) - avg w)/dq in closed form; the
/// rest by RK4 in tau on
///   chi_2' = pi_1/m
///   pi_2'  = -u0' pi_1 - u0'' chi_2 pi_{-1},       chi_3' = pi_2/m + u0' chi_2
///   pi_3'  = -u0' pi_2 - u0'' chi_2 pi_0 - V'' chi_2, chi_4' = pi_3/m
/// with chi_n(0) = 0. The constant in pi_2 is fixed by chi_3(1) = 0 and the
/// constant in pi_3 by zero mean; chi_4(1) = 0 then follows.
inline SecularProfile secular_profiles(const HamiltonianSpec& H, double q_A, double q_B, int intervals = 2048) {
    if (q_A == q_B) throw DegenerateEndpoints();
    if (intervals < 16 || intervals % 2 != 0) throw DomainError("profile grid needs an even number (>= 16) of intervals");
    const double m = H.m, dq = q_B - q_A;
    SecularProfile P;
    P.m = m;
    P.q_A = q_A;
    P.q_B = q_B;
    P.pi_minus1 = m * dq;
    P.magnetic = H.magnetic();
    const double w_avg = path_average([&](double q) { return detail::w_of(H, q); }, q_A, q_B);

    auto ql = [&](double t) { return (1 - t) * q_A + t * q_B; };
    auto pi0 = [&](double t) { return -m * H.u(ql(t)); };
    auto pi1 = [&](double t) { return (detail::w_of(H, ql(t)) - w_avg) / dq; };

    // state: chi1, chi2, pi2raw, chi3raw, pi3raw, chi4raw
    using State = std::array<double, 6>;
    auto rhs = [&](double t, const State& y, double c2) {
        const double q = ql(t);
        const double du = H.du(q), d2u = H.d2u(q), d2V = H.V.d2V(q);
        const double pi2 = y[2] + c2;
        State f{};
        f[0] = pi0(t) / m + H.u(q);
        f[1] = pi1(t) / m;
        f[2] = -du * pi1(t) - d2u * y[1] * P.pi_minus1;
        f[3] = y[2] / m + du * y[1];
        f[4] = -du * pi2 - d2u * y[1] * pi0(t) - d2V * y[1];
        f[5] = y[4] / m;
        return f;
    };
    const int N = intervals;
    const double h = 1.0 / N;
    auto integrate = [&](double c2) {
        std::vector<State> ys(N + 1);
        State y{};
        ys[0] = y;
        for (int k = 0; k < N; ++k) {
            const double t = k * h;
            auto axpy = [](const State& a, double s, const State& b) {
                State r;
                for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + s * b[i];
                return r;
            };
            const State k1 = rhs(t, y, c2);
            const State k2 = rhs(t + h / 2, axpy(y, h / 2, k1), c2);
            const State k3 = rhs(t + h / 2, axpy(y, h / 2, k2), c2);
            const State k4 = rhs(t + h, axpy(y, h, k3), c2);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
            ys[k + 1] = y;
        }
        return ys;
    };
    // pass 1 finds the pi_2 constant from chi_3(1) = 0
    const double c2 = -m * integrate(0.0)[N][3];
    const auto ys = integrate(c2);

    P.tau.resize(N + 1);
    for (int k = 0; k <= N; ++k) P.tau[k] = k * h;
    std::vector<double> pi3raw(N + 1);
    P.pi0.resize(N + 1);
    P.pi1.resize(N + 1);
    P.pi2.resize(N + 1);
    P.chi1.resize(N + 1);
    P.chi2.resize(N + 1);
    P.chi3.resize(N + 1);
    for (int k = 0; k <= N; ++k) {
        const double t = P.tau[k];
        P.pi0[k] = pi0(t);
        P.pi1[k] = pi1(t);
        P.chi1[k] = ys[k][0];
        P.chi2[k] = ys[k][1];
        P.pi2[k] = ys[k][2] + c2;
        P.chi3[k] = ys[k][3] + c2 * t / m;
        pi3raw[k] = ys[k][4];
    }
    const double c3 = -grid_mean(pi3raw);
    P.pi3.resize(N + 1);
    P.chi4.resize(N + 1);
    for (int k = 0; k <= N; ++k) {
        P.pi3[k] = pi3raw[k] + c3;
        P.chi4[k] = ys[k][5] + c3 * P.tau[k] / m;
    }
    return P;
}

} // namespace ordo::classical
