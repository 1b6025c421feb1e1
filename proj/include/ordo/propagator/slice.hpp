#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ordo/classical/hamiltonian.hpp"
#include "ordo/core/error.hpp"
#include "ordo/core/parallel.hpp"
#include "ordo/core/quadrature.hpp"
#include "ordo/kernels/grid.hpp"
#include "ordo/kernels/kernel_matrix.hpp"
#include "ordo/propagator/scheme.hpp"

namespace ordo::propagator {

using kernels::cplx;
using kernels::Grid1D;
using kernels::WaveFunction;
using classical::HamiltonianSpec;
using classical::quad;

/// Propagator matrix <q_i| U |q_j> dq (target row i, source column j).
struct PropagatorMatrix {
    Eigen::MatrixXcd entries;
    Grid1D grid;
    double T = 0.0;
    std::string scheme;
    int N = 1;
    std::optional<double> unitarity_defect; ///< ||U^dagger U - I||_2 when computed

    WaveFunction apply(const WaveFunction& psi) const {
        if (!(psi.grid == grid)) throw DomainError("wavefunction grid does not match propagator grid");
        return WaveFunction(grid, entries * psi.samples);
    }
};

/// How a single slice is realized on the grid.
enum class SliceForm {
    /// exp(-i p^2 dt/2m hbar) summed over the grid momenta (a unitary circulant)
    /// times exp(-i Vbar dt/hbar) on minimum-image segments. Stable under composition.
    BandLimited,
    /// The closed Gaussian form sampled on the grid. Aliases once the kinetic phase
    /// varies faster than the grid resolves, so products of many slices blow up.
    ClosedGaussian,
};

namespace detail {

inline void require_slice_class(const HamiltonianSpec& H) {
    if (H.magnetic()) throw UnsupportedSymbol("slice kernels are defined for H = p^2/2m + V (u0 must be absent)");
}

/// Position of x folded into the grid box [q_min, q_max).
inline double periodic_point(const Grid1D& g, double x) {
    const double L = g.length();
    return g.q_min() + (x - g.q_min()) - L * std::floor((x - g.q_min()) / L);
}

/// Measure-average of V along a -> b in working precision. Polynomial V under
/// Uniform uses exact segment moments; otherwise the measure's atoms or
/// 32-point Gauss-Legendre nodes.
template <class Real>
Real scheme_average(const classical::Potential& V, const Real& a, const Real& b, const opalg::TauMeasure& P) {
    if (P.is_uniform() && V.is_polynomial()) {
        // avg q^k = sum_j a^j b^(k-j) / (k+1)
        const auto& c = V.coefficients();
        Real total(0);
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (c[k] == 0.0) continue;
            Real s(0), ap(1);
            for (std::size_t j = 0; j <= k; ++j) {
                Real bp(1);
                for (std::size_t l = 0; l < k - j; ++l) bp *= b;
                s += ap * bp;
                ap *= a;
            }
            total += Real(c[k]) * s / Real(static_cast<int>(k) + 1);
        }
        return total;
    }
    const MeasureRule rule = measure_rule(P, 32);
    Real s(0);
    for (std::size_t k = 0; k < rule.rule.size(); ++k) {
        const Real t(rule.rule.nodes[k]);
        s += Real(rule.rule.weights[k]) * V.V(Real((1 - t) * a + t * b));
    }
    return s;
}

/// Circulant kernel A(d) = (1/n) sum_k exp(-i p_k^2 dt / 2 m hbar) w^(j_k d).
inline std::vector<cplx> kinetic_slice(const Grid1D& g, double m, double dt) {
    std::vector<cplx> a(g.n());
    for (int k = 0; k < g.n(); ++k) a[k] = std::polar(1.0, -g.p(k) * g.p(k) * dt / (2 * m * g.hbar()));
    return kernels::detail::momentum_transform(g, a);
}

/// exp(-i dt V(x) / hbar) averaged over the measure along the minimum-image
/// segment from q_j to q_i, with V evaluated at the periodic image of x.
/// `average_exponent` selects between exp(-i dt avg V) and avg exp(-i dt V).
inline Eigen::MatrixXcd potential_phase(const HamiltonianSpec& H, const Grid1D& g, double dt, const opalg::TauMeasure& P,
                                        bool average_exponent) {
    const int n = g.n();
    const MeasureRule rule = measure_rule(P, 32);
    Eigen::MatrixXcd W(n, n);
    parallel_for(n, [&](std::size_t ii) {
        const int i = static_cast<int>(ii);
        for (int j = 0; j < n; ++j) {
            const double src = g.q(j);
            const double d = g.wrap(g.q(i) - src);
            if (average_exponent) {
                double vbar = 0.0;
                for (std::size_t k = 0; k < rule.rule.size(); ++k)
                    vbar += rule.rule.weights[k] * H.V.V(periodic_point(g, src + rule.rule.nodes[k] * d));
                W(i, j) = std::polar(1.0, -vbar * dt / g.hbar());
            } else {
                cplx s = 0.0;
                for (std::size_t k = 0; k < rule.rule.size(); ++k)
                    s += rule.rule.weights[k] *
                         std::polar(1.0, -H.V.V(periodic_point(g, src + rule.rule.nodes[k] * d)) * dt / g.hbar());
                W(i, j) = s;
            }
        }
    });
    return W;
}

} // namespace detail

/// Exponent of the closed-form slice kernel from q_src to q_dst:
/// (m (q_dst - q_src)^2 / (2 dt) - Vbar_scheme(q_src, q_dst) dt) / hbar.
template <class Real = quad>
Real slice_exponent(const HamiltonianSpec& H, const Real& q_src, const Real& q_dst, const Real& dt,
                    const SliceScheme& scheme, double hbar = 1.0) {
    detail::require_slice_class(H);
    if (!(dt > 0)) throw DomainError("dt must be positive");
    const Real d = q_dst - q_src;
    const Real vbar = detail::scheme_average(H.V, q_src, q_dst, scheme.measure());
    return (Real(H.m) * d * d / (2 * dt) - vbar * dt) / Real(hbar);
}

/// Closed Gaussian slice: sqrt(m / (2 pi i hbar dt)) exp(i * slice_exponent) dq.
inline PropagatorMatrix slice_kernel(const HamiltonianSpec& H, const Grid1D& g, double dt, const SliceScheme& scheme) {
    detail::require_slice_class(H);
    if (!(dt > 0)) throw DomainError("dt must be positive");
    const int n = g.n();
    const cplx pref = std::sqrt(cplx(H.m / (2 * std::numbers::pi * g.hbar() * dt), 0.0) / cplx(0.0, 1.0)) * g.dq();
    PropagatorMatrix K{Eigen::MatrixXcd(n, n), g, dt, scheme.name(), 1, std::nullopt};
    parallel_for(n, [&](std::size_t ii) {
        const int i = static_cast<int>(ii);
        for (int j = 0; j < n; ++j)
            K.entries(i, j) = pref * std::polar(1.0, slice_exponent<double>(H, g.q(j), g.q(i), dt, scheme, g.hbar()));
    });
    return K;
}

/// Band-limited slice: A_dt(i - j) exp(-i Vbar_scheme dt / hbar) on minimum-image segments.
inline PropagatorMatrix band_limited_slice(const HamiltonianSpec& H, const Grid1D& g, double dt,
                                           const SliceScheme& scheme) {
    detail::require_slice_class(H);
    if (!(dt > 0)) throw DomainError("dt must be positive");
    const int n = g.n();
    const auto A = detail::kinetic_slice(g, H.m, dt);
    PropagatorMatrix K{detail::potential_phase(H, g, dt, scheme.measure(), true), g, dt, scheme.name(), 1, std::nullopt};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) K.entries(i, j) *= A[kernels::detail::mod(i - j, n)];
    return K;
}

/// K^N by binary powering (a fixed sequence of squarings and products).
inline Eigen::MatrixXcd matrix_power(const Eigen::MatrixXcd& K, int N) {
    if (N < 0) throw DomainError("matrix power must be non-negative");
    Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(K.rows(), K.cols());
    Eigen::MatrixXcd base = K;
    bool first = true;
    while (N > 0) {
        if (N & 1) {
            if (first) {
                result = base;
                first = false;
            } else {
                result = result * base;
            }
        }
        N >>= 1;
        if (N > 0) base = base * base;
    }
    return result;
}

/// ||U^dagger U - I||_2.
inline double unitarity_defect(const Eigen::MatrixXcd& U) {
    const Eigen::MatrixXcd D = U.adjoint() * U - Eigen::MatrixXcd::Identity(U.rows(), U.cols());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(D, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

struct ComposeOptions {
    SliceForm form = SliceForm::BandLimited;
    bool track_unitarity = false;
};

/// N identical slices of duration T/N multiplied together.
inline PropagatorMatrix compose_slices(const HamiltonianSpec& H, const Grid1D& g, double T, int N,
                                       const SliceScheme& scheme, const ComposeOptions& opt = {}) {
    if (N < 1) throw DomainError("slice count must be >= 1");
    if (!(T > 0)) throw DomainError("duration must be positive");
    const double dt = T / N;
    const PropagatorMatrix K = opt.form == SliceForm::BandLimited ? band_limited_slice(H, g, dt, scheme)
                                                                   : slice_kernel(H, g, dt, scheme);
    PropagatorMatrix U{matrix_power(K.entries, N), g, T, scheme.name(), N, std::nullopt};
    if (opt.track_unitarity) U.unitarity_defect = unitarity_defect(U.entries);
    return U;
}

/// Spectral propagator of the discretized Hamiltonian kinetic_matrix + diag(V(q_i)).
class SpectralReference {
public:
    SpectralReference(const HamiltonianSpec& H, const Grid1D& g) : grid_(g) {
        detail::require_slice_class(H);
        Eigen::MatrixXcd Hm = kernels::kinetic_matrix(g, H.m).entries;
        Hm = (Hm + Hm.adjoint()) / 2.0;
        for (int i = 0; i < g.n(); ++i) Hm(i, i) += H.V.V(g.q(i));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hm);
        if (es.info() != Eigen::Success) throw NoConvergence("Hermitian eigensolver failed");
        energies_ = es.eigenvalues();
        vectors_ = es.eigenvectors();
    }

    const Grid1D& grid() const { return grid_; }
    const Eigen::VectorXd& energies() const { return energies_; }

    Eigen::MatrixXcd matrix(double T) const {
        Eigen::VectorXcd phase(energies_.size());
        for (Eigen::Index k = 0; k < energies_.size(); ++k) phase(k) = std::polar(1.0, -energies_(k) * T / grid_.hbar());
        return vectors_ * phase.asDiagonal() * vectors_.adjoint();
    }

    WaveFunction apply(double T, const WaveFunction& psi) const {
        Eigen::VectorXcd c = vectors_.adjoint() * psi.samples;
        for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -energies_(k) * T / grid_.hbar());
        return WaveFunction(grid_, vectors_ * c);
    }

private:
    Grid1D grid_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXcd vectors_;
};

inline PropagatorMatrix reference_propagator(const HamiltonianSpec& H, const Grid1D& g, double T) {
    const SpectralReference ref(H, g);
    PropagatorMatrix U{ref.matrix(T), g, T, "reference", 0, std::nullopt};
    U.unitarity_defect = unitarity_defect(U.entries);
    return U;
}

/// Orthonormal plane waves (Euclidean sample inner product) with |p| below
/// `fraction` times the Nyquist momentum.
inline Eigen::MatrixXcd low_momentum_basis(const Grid1D& g, double fraction = 0.5) {
    std::vector<int> ks;
    for (int k = 0; k < g.n(); ++k)
        if (std::abs(g.p(k)) < fraction * g.p_nyquist()) ks.push_back(k);
    Eigen::MatrixXcd B(g.n(), static_cast<Eigen::Index>(ks.size()));
    const double amp = 1.0 / std::sqrt(static_cast<double>(g.n()));
    for (std::size_t c = 0; c < ks.size(); ++c)
        for (int i = 0; i < g.n(); ++i)
            B(i, static_cast<Eigen::Index>(c)) =
                amp * std::polar(1.0, 2 * std::numbers::pi * g.momentum_index(ks[c]) * i / static_cast<double>(g.n()));
    return B;
}

/// Largest singular value of X restricted to the columns of B, i.e. ||X B||_2.
inline double restricted_norm(const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& B) {
    const Eigen::MatrixXcd XB = X * B;
    const Eigen::MatrixXcd G = XB.adjoint() * XB;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// Operator-norm distance ||(U1 - U2) B||_2 on the low-momentum subspace.
inline double low_momentum_distance(const Eigen::MatrixXcd& U1, const Eigen::MatrixXcd& U2, const Eigen::MatrixXcd& B) {
    return restricted_norm(U1 - U2, B);
}

} // namespace ordo::propagator
