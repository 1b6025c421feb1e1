#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ordo/classical/flow.hpp"
#include "ordo/classical/series.hpp"
#include "ordo/core/error.hpp"
#include "ordo/core/parallel.hpp"
#include "ordo/propagator/slice.hpp"

namespace ordo::propagator {

/// Least-squares line through (log x, log y) with a 95% confidence interval
/// on the slope (Student t with n - 2 degrees of freedom).
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t points = 0;
};

inline SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("log-log fit needs at least two points");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!(x[k] > 0) || !(y[k] > 0)) throw DomainError("log-log fit needs positive data");
        lx[k] = std::log(x[k]);
        ly[k] = std::log(y[k]);
    }
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += lx[k] / n;
        my += ly[k] / n;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
    }
    if (sxx == 0) throw DomainError("log-log fit needs distinct abscissae");
    SlopeFit f;
    f.points = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (n > 2) {
        double rss = 0;
        for (std::size_t k = 0; k < n; ++k) rss += std::pow(ly[k] - f.intercept - f.slope * lx[k], 2);
        f.stderr_slope = std::sqrt(rss / (n - 2) / sxx);
        const boost::math::students_t dist(static_cast<double>(n - 2));
        const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
        f.ci_low = f.slope - t * f.stderr_slope;
        f.ci_high = f.slope + t * f.stderr_slope;
    } else {
        f.ci_low = f.ci_high = f.slope;
    }
    return f;
}

inline bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k)
        if (!(v[k] < v[k - 1])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Trotter-limit convergence

struct SchemeConvergence {
    std::string scheme;
    std::vector<double> distance; ///< ||(U_N - U_ref) B||_2 per entry of N
    std::optional<SlopeFit> rate; ///< log-log slope of distance against N
    bool monotone = false;        ///< distance strictly decreasing in N
};

struct ConvergenceReport {
    double T = 0.0;
    std::vector<int> N;
    std::vector<SchemeConvergence> schemes;
    std::vector<double> max_pairwise; ///< largest inter-scheme distance per N

    /// max_pairwise[first] / max_pairwise[last].
    double pairwise_reduction() const { return max_pairwise.front() / max_pairwise.back(); }
};

struct ConvergenceOptions {
    double low_momentum_fraction = 0.5;
    SliceForm form = SliceForm::BandLimited;
};

inline ConvergenceReport convergence_study(const HamiltonianSpec& H, const Grid1D& g, double T,
                                           const std::vector<SliceScheme>& schemes, const std::vector<int>& N_list,
                                           const ConvergenceOptions& opt = {}) {
    if (N_list.size() < 4) throw DomainError("convergence study needs at least 4 slice counts");
    for (std::size_t k = 1; k < N_list.size(); ++k)
        if (N_list[k] <= N_list[k - 1]) throw DomainError("slice counts must be strictly increasing");
    if (schemes.empty()) throw DomainError("convergence study needs at least one scheme");

    const SpectralReference ref(H, g);
    const Eigen::MatrixXcd Uref = ref.matrix(T);
    const Eigen::MatrixXcd B = low_momentum_basis(g, opt.low_momentum_fraction);

    const std::size_t S = schemes.size(), M = N_list.size();
    std::vector<Eigen::MatrixXcd> U(S * M);
    ComposeOptions co;
    co.form = opt.form;
    parallel_for(S * M, [&](std::size_t task) {
        U[task] = compose_slices(H, g, T, N_list[task % M], schemes[task / M], co).entries;
    });

    ConvergenceReport rep;
    rep.T = T;
    rep.N = N_list;
    for (std::size_t s = 0; s < S; ++s) {
        SchemeConvergence sc;
        sc.scheme = schemes[s].name();
        for (std::size_t k = 0; k < M; ++k) sc.distance.push_back(low_momentum_distance(U[s * M + k], Uref, B));
        sc.monotone = strictly_decreasing(sc.distance);
        bool positive = true;
        for (double d : sc.distance) positive = positive && d > 0;
        if (positive) {
            std::vector<double> x(N_list.begin(), N_list.end());
            sc.rate = fit_loglog(x, sc.distance);
        }
        rep.schemes.push_back(std::move(sc));
    }
    for (std::size_t k = 0; k < M; ++k) {
        double worst = 0.0;
        for (std::size_t a = 0; a < S; ++a)
            for (std::size_t b = a + 1; b < S; ++b)
                worst = std::max(worst, low_momentum_distance(U[a * M + k], U[b * M + k], B));
        rep.max_pairwise.push_back(worst);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Fixed-dq short-time phase scaling

struct SchemeScaling {
    std::string scheme;
    std::vector<double> signed_error; ///< unwrapped (slice exponent - S_cl / hbar)
    std::vector<double> phase_error;  ///< |signed_error|
    std::optional<SlopeFit> slope;    ///< absent when every error is below 1e-25
    double eps_coefficient = 0.0;     ///< fitted a in signed_error ~ a dt + b dt^3 + c dt^5
};

struct ScalingReport {
    double q_A = 0.0, q_B = 0.0, delta_q = 0.0;
    std::vector<double> dt;
    std::vector<double> action; ///< S_cl(B|A) per dt
    std::vector<SchemeScaling> schemes;

    const SchemeScaling& scheme(const std::string& name) const {
        for (const auto& s : schemes)
            if (s.scheme == name) return s;
        throw DomainError("no scheme named '" + name + "' in report");
    }
};

struct ScalingOptions {
    double hbar = 1.0;
    int n_steps = 1024;  ///< RK4 steps for the float128 classical action
    double tol = 1e-30;  ///< BVP tolerance
};

/// dt values from hi down to lo, log-spaced.
inline std::vector<double> default_dt_sweep() {
    auto v = classical::log_space(0.01, 0.2, 10);
    std::reverse(v.begin(), v.end());
    return v;
}

inline ScalingReport short_time_phase_scaling(const HamiltonianSpec& H, double q_A, double q_B,
                                              const std::vector<double>& dt_list,
                                              const std::vector<SliceScheme>& schemes,
                                              const ScalingOptions& opt = {}) {
    detail::require_slice_class(H);
    if (q_A == q_B) throw DegenerateEndpoints();
    if (dt_list.size() < 3) throw DomainError("phase scaling needs at least 3 dt values");
    if (!strictly_decreasing(dt_list)) throw DomainError("dt values must be strictly decreasing");
    if (!(dt_list.back() > 0)) throw DomainError("dt values must be positive");

    const std::size_t M = dt_list.size();
    std::vector<quad> S(M);
    parallel_for(M, [&](std::size_t k) {
        const quad qa(q_A), qb(q_B), dt(dt_list[k]);
        const auto path = classical::solve_bvp<quad>(H, qa, qb, dt, quad(opt.tol), opt.n_steps);
        S[k] = classical::endpoint_corrected_action(path, H, qb);
    });

    ScalingReport rep;
    rep.q_A = q_A;
    rep.q_B = q_B;
    rep.delta_q = q_B - q_A;
    rep.dt = dt_list;
    for (const auto& s : S) rep.action.push_back(static_cast<double>(s));

    const quad two_pi = 2 * boost::math::constants::pi<quad>();
    auto principal = [&](const quad& x) { return x - two_pi * boost::multiprecision::round(x / two_pi); };
    for (const auto& scheme : schemes) {
        SchemeScaling sc;
        sc.scheme = scheme.name();
        // wrapped phase differences, then unwrapped along the sweep
        std::vector<quad> unwrapped(M);
        for (std::size_t k = 0; k < M; ++k) {
            const quad phi = slice_exponent<quad>(H, quad(q_A), quad(q_B), quad(dt_list[k]), scheme, opt.hbar);
            const quad wrapped = principal(phi - S[k] / quad(opt.hbar));
            unwrapped[k] = k == 0 ? wrapped : unwrapped[k - 1] + principal(wrapped - principal(unwrapped[k - 1]));
        }
        bool measurable = true;
        for (std::size_t k = 0; k < M; ++k) {
            sc.signed_error.push_back(static_cast<double>(unwrapped[k]));
            sc.phase_error.push_back(std::abs(sc.signed_error.back()));
            measurable = measurable && sc.phase_error.back() > 1e-25;
        }
        if (measurable) sc.slope = fit_loglog(dt_list, sc.phase_error);
        // eps coefficient: signed_error / dt = a + b dt^2 + c dt^4
        std::vector<std::vector<quad>> A(M, std::vector<quad>(3));
        std::vector<quad> y(M);
        for (std::size_t k = 0; k < M; ++k) {
            const quad dt(dt_list[k]);
            A[k] = {quad(1), dt * dt, dt * dt * dt * dt};
            y[k] = unwrapped[k] / dt;
        }
        sc.eps_coefficient = static_cast<double>(classical::detail::lstsq(A, y).x[0]);
        rep.schemes.push_back(std::move(sc));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Chernoff iteration

/// One Chernoff factor: the kernel of the tau-averaged bounded symbol
/// int exp(-i delta H((1 - tau) q_j + tau q_i, p) / hbar) P(dtau)
/// = A_delta(i - j) * int exp(-i delta V(q(tau)) / hbar) P(dtau) on minimum-image segments.
inline Eigen::MatrixXcd chernoff_factor(const HamiltonianSpec& H, const Grid1D& g, double delta,
                                        const opalg::TauMeasure& P) {
    detail::require_slice_class(H);
    if (!(delta > 0)) throw DomainError("Chernoff step must be positive");
    const int n = g.n();
    const auto A = detail::kinetic_slice(g, H.m, delta);
    Eigen::MatrixXcd F = detail::potential_phase(H, g, delta, P, false);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) F(i, j) *= A[kernels::detail::mod(i - j, n)];
    return F;
}

struct ChernoffResult {
    WaveFunction psi;
    int n = 0;
    double t = 0.0;
    std::string measure;
    double distance = 0.0; ///< ||psi_n - exp(-i t H / hbar) psi|| (dq-weighted)
    double norm = 0.0;     ///< ||psi_n||
};

inline ChernoffResult chernoff_iterate(const HamiltonianSpec& H, const Grid1D& g, double t, int n,
                                       const opalg::TauMeasure& P, const WaveFunction& psi,
                                       const SpectralReference& ref) {
    if (n < 1) throw DomainError("Chernoff iteration count must be >= 1");
    if (!(t > 0)) throw DomainError("Chernoff time must be positive");
    if (!(psi.grid == g)) throw DomainError("wavefunction grid does not match");
    const Eigen::MatrixXcd F = chernoff_factor(H, g, t / n, P);
    Eigen::VectorXcd x = psi.samples;
    for (int k = 0; k < n; ++k) x = F * x;
    ChernoffResult r{WaveFunction(g, std::move(x)), n, t, opalg::to_string(P), 0.0, 0.0};
    r.distance = r.psi.distance(ref.apply(t, psi));
    r.norm = r.psi.norm();
    return r;
}

inline ChernoffResult chernoff_iterate(const HamiltonianSpec& H, const Grid1D& g, double t, int n,
                                       const opalg::TauMeasure& P, const WaveFunction& psi) {
    return chernoff_iterate(H, g, t, n, P, psi, SpectralReference(H, g));
}

struct ChernoffStudy {
    std::string measure;
    std::vector<int> n;
    std::vector<double> distance;
    std::vector<double> norm;
    bool monotone = false;
};

inline ChernoffStudy chernoff_study(const HamiltonianSpec& H, const Grid1D& g, double t, const std::vector<int>& n_list,
                                    const opalg::TauMeasure& P, const WaveFunction& psi) {
    const SpectralReference ref(H, g);
    ChernoffStudy st;
    st.measure = opalg::to_string(P);
    st.n = n_list;
    st.distance.resize(n_list.size());
    st.norm.resize(n_list.size());
    parallel_for(n_list.size(), [&](std::size_t k) {
        const auto r = chernoff_iterate(H, g, t, n_list[k], P, psi, ref);
        st.distance[k] = r.distance;
        st.norm[k] = r.norm;
    });
    st.monotone = strictly_decreasing(st.distance);
    return st;
}

} // namespace ordo::propagator
