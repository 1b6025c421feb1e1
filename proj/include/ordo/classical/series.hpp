#pragma once

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/factorials.hpp>

#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ordo/classical/flow.hpp"
#include "ordo/classical/secular.hpp"
#include "ordo/core/error.hpp"
#include "ordo/core/parallel.hpp"

namespace ordo::classical {

/// One route to the eps^5 coefficient.
struct C5Candidate {
    std::string label;
    std::string route;
    double value = 0.0;
};

/// The three eps^5 routes for H = p^2/2m + V; (c) is the designated one.
struct C5Candidates {
    std::array<C5Candidate, 3> candidates;
    std::size_t designated = 2;

    const C5Candidate& value_of_designated() const { return candidates[designated]; }
};

/// Coefficients of S(eps) = c_{-1}/eps + c0 + c1 eps + c2 eps^2 + c3 eps^3 + c5 eps^5.
struct ActionSeries {
    double c_minus1 = 0, c0 = 0, c1 = 0, c2 = 0, c3 = 0, c5 = 0;
    /// Gauge-reduced eps^2 coefficient, S = S_eff[V - m u0^2/2] - m dq avg(u0), which has
    /// no even powers beyond eps^0. Equals c2 when u0 is absent or constant.
    double c2_gauge = 0;
    std::map<std::string, std::string> provenance;
    std::optional<C5Candidates> c5_candidates;

    /// Coefficient of eps^order for order in -1..5 (c4 = 0).
    double coefficient(int order) const {
        switch (order) {
        case -1: return c_minus1;
        case 0: return c0;
        case 1: return c1;
        case 2: return c2;
        case 3: return c3;
        case 4: return 0.0;
        case 5: return c5;
        default: throw DomainError("series order out of range");
        }
    }

    double evaluate(double eps) const {
        return c_minus1 / eps + c0 + eps * (c1 + eps * (c2 + eps * (c3 + eps * eps * c5)));
    }
};

namespace detail {

/// Simpson mean over [0, 1] of the product of two sampled profiles.
inline double profile_product_mean(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> ab(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) ab[k] = a[k] * b[k];
    return grid_mean(ab);
}

/// Effective potential m u0^2/2 subtracted: W(q) = V(q) - m u0(q)^2 / 2.
inline double effective_V(const HamiltonianSpec& H, double q) {
    const double u = H.u(q);
    return H.V.V(q) - H.m * u * u / 2;
}

} // namespace detail

/// The three eps^5 candidates from the secular profiles (u0 must be absent):
/// (a) (avg(V F) - avg V avg F) / (m dq^2) with F = -V',
/// (b) (1/m) int pi_1 pi_3,
/// (c) -(1/2m) int pi_1 pi_3.
inline C5Candidates c5_candidates(const HamiltonianSpec& H, double q_A, double q_B, int intervals = 2048) {
    if (H.magnetic()) throw UnsupportedSymbol("c5 candidates are defined for u0 = 0");
    const SecularProfile P = secular_profiles(H, q_A, q_B, intervals);
    const double m = H.m, dq = q_B - q_A;
    const double VF = path_average([&](double q) { return -H.V.V(q) * H.V.dV(q); }, q_A, q_B);
    const double Vbar = path_average([&](double q) { return H.V.V(q); }, q_A, q_B);
    const double Fbar = path_average([&](double q) { return -H.V.dV(q); }, q_A, q_B);
    const double I = detail::profile_product_mean(P.pi1, P.pi3);
    C5Candidates out;
    out.candidates[0] = {"a", "closed-form covariance (avg(VF) - avg(V) avg(F)) / (m dq^2)", (VF - Vbar * Fbar) / (m * dq * dq)};
    out.candidates[1] = {"b", "profile integral +(1/m) int pi1 pi3", I / m};
    out.candidates[2] = {"c", "integration by parts with V' chi4 + V'' chi2^2 / 2 retained: -(1/2m) int pi1 pi3",
                         -I / (2 * m)};
    out.designated = 2;
    return out;
}

/// Closed-form series coefficients.
///
/// u0 absent: c_{-1} = m dq^2/2, c1 = -avg V, c3 = -(avg V^2 - (avg V)^2)/(2 m dq^2),
/// c5 from the designated candidate.
/// u0 present: c0 = -m dq avg u0, c1 = (m/2) avg u0^2 - avg V, c2 from the
/// closed form -(1/dq)(m avg u0^3 - avg(u0 V) - m avg u0 avg u0^2 + avg u0 avg V);
/// c3 and c5 from the same formulas with V replaced by V - m u0^2/2.
inline ActionSeries action_series(const HamiltonianSpec& H, double q_A, double q_B, int intervals = 2048) {
    if (q_A == q_B) throw DegenerateEndpoints();
    const double m = H.m, dq = q_B - q_A;
    auto avg = [&](auto f) { return path_average(f, q_A, q_B); };
    ActionSeries s;
    s.c_minus1 = m * dq * dq / 2;
    s.provenance["c_minus1"] = "free action m dq^2 / 2";

    const double W = avg([&](double q) { return detail::effective_V(H, q); });
    const double W2 = avg([&](double q) { const double w = detail::effective_V(H, q); return w * w; });
    s.c3 = -(W2 - W * W) / (2 * m * dq * dq);

    if (!H.magnetic()) {
        s.c1 = -W;
        s.provenance["c0"] = "vanishes (u0 absent)";
        s.provenance["c1"] = "-avg V";
        s.provenance["c2"] = "vanishes (u0 absent)";
        s.provenance["c3"] = "-(avg V^2 - (avg V)^2) / (2 m dq^2)";
        s.c5_candidates = c5_candidates(H, q_A, q_B, intervals);
        s.c5 = s.c5_candidates->value_of_designated().value;
        s.provenance["c5"] = "candidate (" + s.c5_candidates->value_of_designated().label + "): " +
                             s.c5_candidates->value_of_designated().route;
        return s;
    }

    const double u = avg([&](double q) { return H.u(q); });
    const double u2 = avg([&](double q) { return std::pow(H.u(q), 2); });
    const double u3 = avg([&](double q) { return std::pow(H.u(q), 3); });
    const double uV = avg([&](double q) { return H.u(q) * H.V.V(q); });
    const double V = avg([&](double q) { return H.V.V(q); });
    s.c0 = -m * dq * u;
    s.c1 = m / 2 * u2 - V;
    s.c2 = -(m * u3 - uV - m * u * u2 + u * V) / dq;
    s.c2_gauge = 0.0;
    s.provenance["c0"] = "-m dq avg u0";
    s.provenance["c1"] = "(m/2) avg u0^2 - avg V";
    s.provenance["c2"] = "-(1/dq)(m avg u0^3 - avg(u0 V) - m avg u0 avg u0^2 + avg u0 avg V)";
    s.provenance["c3"] = "variance formula with V - m u0^2 / 2";
    const SecularProfile P = secular_profiles(H, q_A, q_B, intervals);
    s.c5 = -detail::profile_product_mean(P.pi1, P.pi3) / (2 * m);
    s.provenance["c5"] = "-(1/2m) int pi1 pi3 on the magnetic profiles";
    return s;
}

/// Taylor coefficients of the closed-form actions, keyed by eps power.
/// Harmonic uses cot x = sum (-1)^n 2^{2n} B_{2n} x^{2n-1}/(2n)! and
/// csc x = sum (-1)^{n+1} (2^{2n} - 2) B_{2n} x^{2n-1}/(2n)!.
inline std::map<int, double> exact_action_taylor(ExactKind kind, double m, double param, double q_A, double q_B,
                                                 int max_order = 7) {
    const double dq = q_B - q_A;
    std::map<int, double> c;
    c[-1] = m * dq * dq / 2;
    if (kind == ExactKind::Linear) {
        c[1] = param * (q_A + q_B) / 2;
        c[3] = -param * param / (24 * m);
        return c;
    }
    if (kind != ExactKind::Harmonic || param == 0) return c;
    const double w = param;
    // S = (m w / 2) [ (q_A^2 + q_B^2) cot(w eps) - 2 q_A q_B csc(w eps) ]
    for (int n = 1; 2 * n - 1 <= max_order; ++n) {
        const double B = boost::math::bernoulli_b2n<double>(n);
        const double fact = boost::math::factorial<double>(2 * n);
        const double sign = n % 2 ? -1.0 : 1.0;
        const double cot = sign * std::ldexp(1.0, 2 * n) * B / fact;
        const double csc = -sign * (std::ldexp(1.0, 2 * n) - 2) * B / fact;
        c[2 * n - 1] = m * w / 2 * ((q_A * q_A + q_B * q_B) * cot - 2 * q_A * q_B * csc) * std::pow(w, 2 * n - 1);
    }
    return c;
}

/// Numeric fit of S(eps) against {eps^-1, 1, eps, ..., eps^5}.
struct SeriesFit {
    static constexpr int kMinOrder = -1;
    static constexpr int kMaxOrder = 5;
    static constexpr int kTerms = kMaxOrder - kMinOrder + 1;

    std::vector<double> eps;
    std::vector<double> S;        ///< BVP actions (rounded from the working precision)
    std::array<double, kTerms> coeffs{};
    std::array<double, kTerms> sigma{};  ///< statistical standard errors
    std::array<double, kTerms> floor{};  ///< 3 sigma + |c(N) - c(N/2)| + |c - c(basis + eps^6)|
    double residual_norm = 0.0;          ///< ||S - fit||_2 relative to ||S||_2
    double condition = 0.0;              ///< 2-norm condition of the column-scaled basis
    int n_steps = 0;

    double coefficient(int order) const { return coeffs.at(order - kMinOrder); }
    double noise_floor(int order) const { return floor.at(order - kMinOrder); }
    double stderr_of(int order) const { return sigma.at(order - kMinOrder); }
    /// |c_order| below its noise floor.
    bool vanishes(int order) const { return std::abs(coefficient(order)) <= noise_floor(order); }
};

struct FitOptions {
    int n_steps = 1024;  ///< RK4 steps per trajectory (halved once for the discretization floor)
    double tol = 1e-30;  ///< absolute BVP tolerance on q(eps), in working precision
};

/// n log-spaced values in [lo, hi].
inline std::vector<double> log_space(double lo, double hi, int n) {
    if (!(lo > 0) || !(hi > lo) || n < 2) throw DomainError("log_space needs 0 < lo < hi and n >= 2");
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
    return v;
}

/// 12 log-spaced values in [1e-3, 1e-1].
inline std::vector<double> default_eps_sweep() { return log_space(1e-3, 1e-1, 12); }

namespace detail {

template <class Real>
struct LeastSquares {
    std::vector<Real> x;
    std::vector<Real> residual;
    std::vector<std::vector<Real>> R_inv;  ///< inverse of the upper-triangular factor
    std::vector<Real> scale;               ///< column scales
};

/// Least squares by modified Gram-Schmidt QR of the column-scaled matrix.
template <class Real>
LeastSquares<Real> lstsq(const std::vector<std::vector<Real>>& A, const std::vector<Real>& y) {
    using std::abs;
    using std::sqrt;
    const std::size_t M = A.size(), K = A[0].size();
    LeastSquares<Real> out;
    out.scale.assign(K, Real(0));
    for (std::size_t j = 0; j < K; ++j)
        for (std::size_t i = 0; i < M; ++i) out.scale[j] = std::max<Real>(out.scale[j], abs(A[i][j]));
    std::vector<std::vector<Real>> Q(K, std::vector<Real>(M));
    for (std::size_t j = 0; j < K; ++j)
        for (std::size_t i = 0; i < M; ++i) Q[j][i] = A[i][j] / out.scale[j];
    std::vector<std::vector<Real>> R(K, std::vector<Real>(K, Real(0)));
    for (std::size_t j = 0; j < K; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            Real d(0);
            for (std::size_t i = 0; i < M; ++i) d += Q[k][i] * Q[j][i];
            R[k][j] = d;
            for (std::size_t i = 0; i < M; ++i) Q[j][i] -= d * Q[k][i];
        }
        Real nrm(0);
        for (std::size_t i = 0; i < M; ++i) nrm += Q[j][i] * Q[j][i];
        nrm = sqrt(nrm);
        if (nrm == 0) throw DomainError("fit basis is rank deficient (repeated eps values?)");
        R[j][j] = nrm;
        for (std::size_t i = 0; i < M; ++i) Q[j][i] /= nrm;
    }
    // z = R^{-1} Q^T y by back substitution
    std::vector<Real> qty(K, Real(0));
    for (std::size_t j = 0; j < K; ++j)
        for (std::size_t i = 0; i < M; ++i) qty[j] += Q[j][i] * y[i];
    out.R_inv.assign(K, std::vector<Real>(K, Real(0)));
    for (std::size_t c = 0; c < K; ++c) {
        for (std::size_t r = K; r-- > 0;) {
            Real s = (r == c) ? Real(1) : Real(0);
            for (std::size_t k = r + 1; k < K; ++k) s -= R[r][k] * out.R_inv[k][c];
            out.R_inv[r][c] = s / R[r][r];
        }
    }
    out.x.assign(K, Real(0));
    for (std::size_t r = 0; r < K; ++r)
        for (std::size_t c = 0; c < K; ++c) out.x[r] += out.R_inv[r][c] * qty[c];
    out.residual.resize(M);
    for (std::size_t i = 0; i < M; ++i) {
        Real s = y[i];
        for (std::size_t j = 0; j < K; ++j) s -= A[i][j] / out.scale[j] * out.x[j];
        out.residual[i] = s;
    }
    for (std::size_t j = 0; j < K; ++j) out.x[j] /= out.scale[j];
    return out;
}

/// BVP actions S(eps) in working precision, computed in parallel.
template <class Real>
std::vector<Real> bvp_actions(const HamiltonianSpec& H, double q_A, double q_B, const std::vector<double>& eps,
                              const FitOptions& opt, int n_steps) {
    std::vector<Real> S(eps.size());
    parallel_for(eps.size(), [&](std::size_t k) {
        const Real qa(q_A), qb(q_B), e(eps[k]);
        const auto path = solve_bvp<Real>(H, qa, qb, e, Real(opt.tol), n_steps);
        S[k] = endpoint_corrected_action(path, H, qb);
    });
    return S;
}

} // namespace detail

/// Fits BVP-computed actions in float128. The RK4 and Simpson errors are
/// analytic in eps at a fixed step count, so they shift the coefficients by
/// O(n_steps^-4); that shift is measured by refitting at n_steps/2. Omitted
/// higher orders leak into the fitted ones; that leak is estimated by
/// refitting with one extra power. Both shifts are added to the noise floor.
inline SeriesFit fit_series_numeric(const HamiltonianSpec& H, double q_A, double q_B, const std::vector<double>& eps_list,
                                    const FitOptions& opt = {}) {
    using Real = quad;
    constexpr int K = SeriesFit::kTerms;
    std::vector<double> eps = eps_list;
    std::sort(eps.begin(), eps.end());
    if (std::adjacent_find(eps.begin(), eps.end()) != eps.end()) throw DomainError("eps values must be distinct");
    if (eps.size() < 9) throw DomainError("series fit needs at least 9 eps values");
    if (!(eps.front() > 0)) throw DomainError("eps values must be positive");
    if (eps.back() < 10 * eps.front() * (1 - 1e-12)) throw DomainError("eps values must span at least one decade");
    if (opt.n_steps < 32) throw DomainError("series fit needs at least 32 steps");

    std::vector<std::vector<Real>> A(eps.size(), std::vector<Real>(K));
    for (std::size_t i = 0; i < eps.size(); ++i)
        for (int j = 0; j < K; ++j) A[i][j] = boost::multiprecision::pow(Real(eps[i]), j + SeriesFit::kMinOrder);

    const auto S = detail::bvp_actions<Real>(H, q_A, q_B, eps, opt, opt.n_steps);
    const auto S_half = detail::bvp_actions<Real>(H, q_A, q_B, eps, opt, opt.n_steps / 2);
    const auto fit = detail::lstsq(A, S);
    const auto fit_half = detail::lstsq(A, S_half);
    // basis truncation: shift of the coefficients when eps^6 is admitted
    auto A_ext = A;
    for (std::size_t i = 0; i < eps.size(); ++i) A_ext[i].push_back(boost::multiprecision::pow(Real(eps[i]), 6));
    const auto fit_ext = detail::lstsq(A_ext, S);

    SeriesFit out;
    out.eps = eps;
    out.n_steps = opt.n_steps;
    Real rss(0), yss(0);
    for (std::size_t i = 0; i < eps.size(); ++i) {
        out.S.push_back(static_cast<double>(S[i]));
        rss += fit.residual[i] * fit.residual[i];
        yss += S[i] * S[i];
    }
    out.residual_norm = static_cast<double>(boost::multiprecision::sqrt(rss / yss));
    const std::size_t dof = eps.size() - K;
    const Real s2 = dof > 0 ? rss / dof : Real(0);
    for (int j = 0; j < K; ++j) {
        Real row(0);
        for (int c = 0; c < K; ++c) row += fit.R_inv[j][c] * fit.R_inv[j][c];
        const Real sigma = boost::multiprecision::sqrt(s2 * row) / fit.scale[j];
        out.coeffs[j] = static_cast<double>(fit.x[j]);
        out.sigma[j] = static_cast<double>(sigma);
        out.floor[j] = static_cast<double>(3 * sigma + boost::multiprecision::abs(fit.x[j] - fit_half.x[j]) +
                                           boost::multiprecision::abs(fit.x[j] - fit_ext.x[j]));
    }
    Eigen::MatrixXd B(eps.size(), K);
    for (std::size_t i = 0; i < eps.size(); ++i)
        for (int j = 0; j < K; ++j) B(i, j) = static_cast<double>(A[i][j] / fit.scale[j]);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
    const auto& sv = svd.singularValues();
    out.condition = sv(0) / sv(sv.size() - 1);
    return out;
}

} // namespace ordo::classical
