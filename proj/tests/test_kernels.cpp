#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "ordo/kernels/io.hpp"
#include "ordo/kernels/kernel_matrix.hpp"
#include "ordo/opalg/symbol.hpp"

using namespace ordo;
using namespace ordo::kernels;
using opalg::TauMeasure;

namespace {

using Eigen::MatrixXcd;

double rel_diff(const MatrixXcd& a, const MatrixXcd& b) { return (a - b).norm() / std::max(a.norm(), b.norm()); }

PositionFunction harmonic_v(double m, double omega) { return PositionFunction::polynomial({0.0, 0.0, 0.5 * m * omega * omega}); }

PositionFunction gaussian_bump(double V0, double w) {
    return PositionFunction::general([=](double q) { return V0 * std::exp(-q * q / (2 * w * w)); },
                                     [=](double q) { return -V0 * q / (w * w) * std::exp(-q * q / (2 * w * w)); },
                                     [=](double q) { return V0 * (q * q / (w * w) - 1) / (w * w) * std::exp(-q * q / (2 * w * w)); });
}

/// Spectral momentum matrix, built independently of the library transform:
/// P = F^{-1} diag(p) F with an explicit DFT on the centered momentum grid.
MatrixXcd spectral_p(const Grid1D& g) {
    const int n = g.n();
    MatrixXcd F(n, n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) F(k, i) = std::exp(cplx(0, -2 * std::numbers::pi * g.momentum_index(k) * i / n));
    Eigen::VectorXcd p(n);
    for (int k = 0; k < n; ++k) p(k) = g.p(k);
    return F.adjoint() * p.asDiagonal() * F / static_cast<double>(n);
}

MatrixXcd diag_q(const Grid1D& g) {
    MatrixXcd Q = MatrixXcd::Zero(g.n(), g.n());
    for (int i = 0; i < g.n(); ++i) Q(i, i) = g.q(i);
    return Q;
}

const std::vector<TauMeasure>& all_measures() {
    static const std::vector<TauMeasure> ms = {TauMeasure::point_mass(0), TauMeasure::weyl(), TauMeasure::point_mass(1),
                                               TauMeasure::uniform()};
    return ms;
}

} // namespace

TEST(Grid, Layout) {
    const Grid1D g(-4, 4, 16, 0.5);
    EXPECT_DOUBLE_EQ(g.dq(), 0.5);
    EXPECT_DOUBLE_EQ(g.q(0), -4);
    EXPECT_DOUBLE_EQ(g.q(15), 3.5);
    EXPECT_EQ(g.momentum_index(0), -8);
    EXPECT_DOUBLE_EQ(g.p(8), 0.0);
    EXPECT_DOUBLE_EQ(g.p(9), 2 * std::numbers::pi * 0.5 / 8.0);
    EXPECT_DOUBLE_EQ(g.wrap(5.0), -3.0);
    EXPECT_DOUBLE_EQ(g.wrap(-4.0), -4.0);
    EXPECT_THROW(Grid1D(-1, 1, 6), DomainError);
    EXPECT_THROW(Grid1D(-1, 1, 9), DomainError);
    EXPECT_THROW(Grid1D(1, 1, 8), DomainError);
}

TEST(AverageSymbol, Examples) {
    const auto H = SymbolFunction::standard(1.0, harmonic_v(2.0, 1.5));
    EXPECT_DOUBLE_EQ(average_symbol(H, 0.7, 0.7, 1.3, TauMeasure::uniform()), H(0.7, 1.3));
    const double a = 0.4, b = -1.1;
    EXPECT_NEAR(average_symbol(H, a, b, 0.0, TauMeasure::uniform()), (2.0 * 2.25 / 6) * (a * a + a * b + b * b), 1e-14);
    const auto lin = SymbolFunction::potential(PositionFunction::polynomial({0.3, -2.0}));
    EXPECT_NEAR(average_symbol(lin, a, b, 5.0, TauMeasure::uniform()), 0.3 - 2.0 * (a + b) / 2, 1e-14);
    EXPECT_NEAR(average_symbol(H, a, b, 0.0, TauMeasure::point_mass(0)), H(a, 0.0), 1e-15);
    EXPECT_NEAR(average_symbol(H, a, b, 0.0, TauMeasure::point_mass(1)), H(b, 0.0), 1e-15);
}

TEST(AverageSymbol, NonPolynomialUsesQuadrature) {
    const auto V = gaussian_bump(1.3, 0.4);
    const auto H = SymbolFunction::potential(V);
    const double a = -0.9, b = 1.2;
    const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double t) { return V((1 - t) * a + t * b); }, 0.0, 1.0, 15, 1e-14);
    EXPECT_NEAR(average_symbol(H, a, b, 0.0, TauMeasure::uniform()), oracle, 1e-12);
}

TEST(PositionFunction, DerivativesConsistent) {
    const auto poly = PositionFunction::polynomial({1.0, -2.0, 0.5, 0.25});
    for (const auto& f : {poly, gaussian_bump(1.0, 0.7)})
        for (double x : {-1.3, 0.1, 0.8}) {
            const double h = 1e-5;
            EXPECT_NEAR(f.d1(x), (f(x + h) - f(x - h)) / (2 * h), 1e-6 * std::max(1.0, std::abs(f.d1(x))));
            EXPECT_NEAR(f.d2(x), (f.d1(x + h) - f.d1(x - h)) / (2 * h), 1e-6 * std::max(1.0, std::abs(f.d2(x))));
        }
}

TEST(KernelMatrix, PotentialOnlyIsDiagonal) {
    const Grid1D g(-3, 3, 16);
    const auto V = harmonic_v(1.0, 1.0);
    for (const auto& P : all_measures()) {
        const auto K = kernel_matrix(SymbolFunction::potential(V), g, P);
        for (int i = 0; i < g.n(); ++i)
            for (int j = 0; j < g.n(); ++j) EXPECT_EQ(K.entries(i, j), cplx(i == j ? V(g.q(i)) : 0.0));
    }
}

TEST(KernelMatrix, KineticIsRuleIndependent) {
    const Grid1D g(-3, 3, 32);
    const auto T = kinetic_matrix(g, 1.5);
    for (const auto& P : all_measures()) {
        const auto K = kernel_matrix(SymbolFunction::standard(1.5, PositionFunction()), g, P);
        EXPECT_LT(rel_diff(K.entries, T.entries), 1e-13);
    }
}

TEST(KernelMatrix, StandardClassRuleIndependent) {
    const Grid1D g(-5, 5, 64);
    for (const auto& V : {harmonic_v(1.0, 1.0), PositionFunction::polynomial({0, 0.2, 0, 0, 0.1}), gaussian_bump(2.0, 0.5)}) {
        const auto H = SymbolFunction::standard(1.0, V);
        MatrixXcd expected = kinetic_matrix(g, 1.0).entries;
        for (int i = 0; i < g.n(); ++i) expected(i, i) += V(g.q(i));
        for (const auto& P : all_measures()) EXPECT_LT(rel_diff(kernel_matrix(H, g, P).entries, expected), 1e-10);
    }
}

TEST(KernelMatrix, TauRuleOfQPMatchesOperatorProducts) {
    const Grid1D g(-2, 3, 32, 0.7);
    const MatrixXcd Q = diag_q(g), Pm = spectral_p(g);
    const auto qp = SymbolFunction::from_poly(opalg::parse_symbol("q p"));
    for (double tau : {0.0, 0.25, 0.5, 1.0}) {
        const auto K = kernel_matrix(qp, g, TauMeasure::point_mass(Rational(static_cast<long long>(tau * 4), 4)));
        EXPECT_LT(rel_diff(K.entries, (1 - tau) * Q * Pm + tau * Pm * Q), 1e-12) << tau;
    }
}

TEST(KernelMatrix, MeanHalfEquivalenceForQP) {
    const Grid1D g(-4, 4, 48);
    const TauMeasure mix = TauMeasure::mixture({{Rational(1, 2), Rational(1, 4)}, {Rational(1, 2), Rational(3, 4)}});
    const auto qp = SymbolFunction::from_poly(opalg::parse_symbol("q p"));
    const auto weyl = kernel_matrix(qp, g, TauMeasure::weyl()).entries;
    EXPECT_LT(rel_diff(kernel_matrix(qp, g, TauMeasure::uniform()).entries, weyl), 1e-10);
    EXPECT_LT(rel_diff(kernel_matrix(qp, g, mix).entries, weyl), 1e-10);
    // mean 1/2 is what matters: a point mass at 1/3 does not agree
    EXPECT_GT(rel_diff(kernel_matrix(qp, g, TauMeasure::point_mass(Rational(1, 3))).entries, weyl), 1e-3);
}

TEST(KernelMatrix, MeanHalfEquivalenceForPolynomialTimesP) {
    // For nonlinear phi the identity is an operator statement: the discrete
    // momentum sum of p is not local, so individual entries differ, but the
    // matrices act identically on states localized away from the periodic seam.
    const Grid1D g(-10, 10, 128);
    const TauMeasure mix = TauMeasure::mixture({{Rational(1, 2), Rational(1, 4)}, {Rational(1, 2), Rational(3, 4)}});
    for (const char* s : {"q^3 p - 2 q^2 p + p", "q^5 p"}) {
        const auto f = SymbolFunction::from_poly(opalg::parse_symbol(s));
        const auto weyl = kernel_matrix(f, g, TauMeasure::weyl()).entries;
        for (const auto& P : {TauMeasure::uniform(), mix}) {
            const auto other = kernel_matrix(f, g, P).entries;
            for (double q0 : {-1.0, 0.0, 1.5}) {
                const auto psi = WaveFunction::gaussian(g, q0, 0.5, 1.0);
                const Eigen::VectorXcd ref = weyl * psi.samples;
                EXPECT_LT((other * psi.samples - ref).norm() / ref.norm(), 1e-10) << s << " " << q0;
            }
        }
    }
}

TEST(KernelMatrix, Hermiticity) {
    const Grid1D g(-3, 3, 32);
    const auto f = SymbolFunction::from_poly(opalg::parse_symbol("q^2 p^2 + 3 q p - p^2 + q^4"));
    const TauMeasure sym_mix = TauMeasure::mixture({{Rational(1, 3), Rational(1, 5)}, {Rational(1, 3), Rational(1, 2)},
                                                    {Rational(1, 3), Rational(4, 5)}});
    for (const auto& P : {TauMeasure::uniform(), TauMeasure::weyl(), sym_mix})
        EXPECT_LT(kernel_matrix(f, g, P).hermiticity_defect(), 1e-10) << to_string(P);
    // a non-symmetric measure is not Hermitian on q p terms
    EXPECT_GT(kernel_matrix(f, g, TauMeasure::point_mass(0)).hermiticity_defect(), 1e-3);
}

TEST(KernelMatrix, WeylMinusBornJordanOnQ2P2IsHbarSquaredOverSix) {
    // Exact operator identity: W(q^2p^2) - BJ(q^2p^2) = (hbar^2/6) I.
    // Checked on smooth wave packets away from the periodic seam.
    const double hbar = 0.8;
    const Grid1D g(-10, 10, 256, hbar);
    const auto f = SymbolFunction::from_poly(opalg::parse_symbol("q^2 p^2"));
    const MatrixXcd D = kernel_matrix(f, g, TauMeasure::weyl()).entries - kernel_matrix(f, g, TauMeasure::uniform()).entries;
    for (double q0 : {-1.0, 0.0, 2.0}) {
        const auto psi = WaveFunction::gaussian(g, q0, 0.5, 1.0);
        const Eigen::VectorXcd Dpsi = D * psi.samples;
        const double err = std::sqrt(g.dq()) * (Dpsi - (hbar * hbar / 6) * psi.samples).norm();
        EXPECT_LT(err, 1e-6) << q0;
    }
}

TEST(KernelMatrix, PDegreeGate) {
    const Grid1D g(-2, 2, 16);
    const auto cubic = SymbolFunction::from_poly(opalg::parse_symbol("p^3 + q"));
    EXPECT_THROW(kernel_matrix(cubic, g, TauMeasure::uniform()), UnsupportedSymbol);
    KernelOptions opt;
    opt.p_cutoff = 0.5 * g.p_nyquist();
    const auto K = kernel_matrix(cubic, g, TauMeasure::uniform(), opt);
    EXPECT_TRUE(K.entries.allFinite());
    EXPECT_LT(K.hermiticity_defect(), 1e-12);
}

TEST(Kinetic, PlaneWavesAreEigenvectors) {
    const Grid1D g(-3, 5, 64, 1.3);
    const auto T = kinetic_matrix(g, 0.7);
    for (int k : {0, 5, 32, 40, 63}) {
        const auto pw = WaveFunction::plane_wave(g, k);
        const Eigen::VectorXcd Tv = T.apply(pw.samples);
        const double lambda = g.p(k) * g.p(k) / (2 * 0.7);
        EXPECT_LT((Tv - lambda * pw.samples).norm() / pw.samples.norm(), 1e-12 * std::max(1.0, lambda)) << k;
    }
    EXPECT_LT(rel_diff(kinetic_matrix(g, 1.4).entries, 0.5 * T.entries), 1e-15);
    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(g.n());
    EXPECT_LT(T.apply(ones).norm(), 1e-14 * T.entries.norm());
    EXPECT_LT(T.hermiticity_defect(), 1e-14);
}

TEST(ShortTimeKernel, FreeKernelPhaseMatchesClosedGaussian) {
    const Grid1D g(-8, 8, 512);
    // dt small enough that the stationary momentum m*dq/dt stays well inside
    // the grid and periodic images of the kernel do not overlap
    const double m = 1.0, dt = 0.05;
    const auto K = short_time_kernel(SymbolFunction::standard(m, PositionFunction()), g, dt, TauMeasure::uniform());
    const int j = g.n() / 2;
    for (int d : {0, 3, 10, 25, 60}) {
        const int i = j + d;
        const double dq = g.q(i) - g.q(j);
        const double expected_phase = m * dq * dq / (2 * g.hbar() * dt) - std::numbers::pi / 4;
        const double phase_err = std::remainder(std::arg(K.entries(i, j)) - expected_phase, 2 * std::numbers::pi);
        EXPECT_LT(std::abs(phase_err), 0.05) << d;
        const double amp = g.dq() * std::sqrt(m / (2 * std::numbers::pi * g.hbar() * dt));
        EXPECT_NEAR(std::abs(K.entries(i, j)) / amp, 1.0, 0.05) << d;
    }
}

TEST(ShortTimeKernel, TendsToDeltaAsDtVanishes) {
    const Grid1D g(-2, 2, 32);
    const auto K = short_time_kernel(SymbolFunction::standard(1.0, harmonic_v(1, 1)), g, 1e-12, TauMeasure::uniform());
    EXPECT_LT((K.entries - MatrixXcd::Identity(g.n(), g.n())).norm(), 1e-9);
}

TEST(ShortTimeKernel, PotentialEntersThroughSegmentAverage) {
    const Grid1D g(-4, 4, 64);
    const double dt = 0.05;
    const auto V = harmonic_v(1.0, 1.3);
    const auto free = short_time_kernel(SymbolFunction::standard(1.0, PositionFunction()), g, dt, TauMeasure::uniform());
    for (const auto& P : all_measures()) {
        const auto K = short_time_kernel(SymbolFunction::standard(1.0, V), g, dt, P);
        const auto rule = measure_rule(P);
        for (int i : {10, 31, 50})
            for (int j : {12, 32, 47}) {
                // segment from the source q_j to the target q_i
                const cplx factor = std::polar(1.0, -V.segment_average(g.q(j), g.q(i), rule) * dt / g.hbar());
                EXPECT_LT(std::abs(K.entries(i, j) - free.entries(i, j) * factor), 1e-14);
            }
    }
}

TEST(ShortTimeKernel, GeneralPathMatchesDirectSum) {
    // Magnetic symbol p^2/2m + gamma q p + w^2 q^2/2 is not split; compare
    // the library against the defining sum written out by hand.
    const Grid1D g(-1.5, 1.5, 12, 0.9);
    const double m = 1.2, gamma = 0.3, w2 = 0.8, dt = 0.2;
    const auto H = SymbolFunction::magnetic(m, PositionFunction::polynomial({0, gamma}), PositionFunction::polynomial({0, 0, w2 / 2}));
    const auto K = short_time_kernel(H, g, dt, TauMeasure::uniform());
    const int n = g.n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double a = g.q(j), b = g.q(i);
            cplx s = 0;
            for (int k = 0; k < n; ++k) {
                const double p = g.p(k);
                const double hbar_avg = p * p / (2 * m) + gamma * p * (a + b) / 2 + (w2 / 2) * (a * a + a * b + b * b) / 3;
                s += std::exp(cplx(0, (p * (b - a) - hbar_avg * dt) / g.hbar()));
            }
            EXPECT_LT(std::abs(K.entries(i, j) - s / static_cast<double>(n)), 1e-12);
        }
}

TEST(ExpSymbolKernel, ZeroStepIsIdentityAndFreeIsSpectral) {
    const Grid1D g(-4, 4, 32);
    const auto H = SymbolFunction::standard(1.0, harmonic_v(1, 1));
    EXPECT_LT((exp_symbol_kernel(H, g, 0.0, TauMeasure::uniform()).entries - MatrixXcd::Identity(32, 32)).norm(), 1e-12);
    const auto free = SymbolFunction::standard(1.0, PositionFunction());
    const auto F = exp_symbol_kernel(free, g, 0.3, TauMeasure::weyl());
    const auto S = short_time_kernel(free, g, 0.3, TauMeasure::weyl());
    EXPECT_LT(rel_diff(F.entries, S.entries), 1e-14);
    // unitary: the free symbol is a pure Fourier multiplier
    EXPECT_LT((F.entries.adjoint() * F.entries - MatrixXcd::Identity(32, 32)).norm(), 1e-12);
}

TEST(ExpSymbolKernel, GeneralPathMatchesSplitPath) {
    const Grid1D g(-2, 2, 16);
    const auto V = harmonic_v(1, 1);
    const auto split = SymbolFunction::standard(1.0, V);
    // same symbol, written so that the kinetic term carries a q-factor
    const SymbolFunction general({{2, {}, PositionFunction::polynomial({0.5, 1e-300})}, {0, {}, V}}, "general");
    ASSERT_FALSE(general.is_split());
    for (const auto& P : {TauMeasure::uniform(), TauMeasure::point_mass(Rational(1, 3))}) {
        const auto A = exp_symbol_kernel(split, g, 0.1, P).entries;
        const auto B = exp_symbol_kernel(general, g, 0.1, P).entries;
        EXPECT_LT(rel_diff(A, B), 1e-13);
    }
}

TEST(ApplyPseudodiff, PotentialOnlyIsPointwise) {
    const Grid1D g(-3, 3, 32);
    const auto V = harmonic_v(1, 1);
    const auto psi = WaveFunction::gaussian(g, 0.3, 0.2, 0.8);
    const auto out = apply_pseudodiff(SymbolFunction::potential(V), TauMeasure::uniform(), psi, 100.0);
    for (int i = 0; i < g.n(); ++i) EXPECT_LT(std::abs(out.samples(i) - V(g.q(i)) * psi.samples(i)), 1e-12);
}

TEST(ApplyPseudodiff, NoCutoffMatchesKernelMatrix) {
    const Grid1D g(-4, 4, 48);
    const auto H = SymbolFunction::standard(1.0, PositionFunction::polynomial({0, 0.1, 0.5, 0, 0.05}));
    const auto psi = WaveFunction::gaussian(g, -0.5, 1.0, 0.7);
    for (const auto& P : {TauMeasure::uniform(), TauMeasure::weyl()}) {
        const auto out = apply_pseudodiff(H, P, psi, std::numeric_limits<double>::infinity());
        const Eigen::VectorXcd ref = kernel_matrix(H, g, P).apply(psi.samples);
        EXPECT_LT((out.samples - ref).norm() / ref.norm(), 1e-10);
    }
}

TEST(ApplyPseudodiff, CutoffLimits) {
    const Grid1D g(-4, 4, 32);
    const auto H = SymbolFunction::standard(1.0, harmonic_v(1, 1));
    const auto psi = WaveFunction::gaussian(g, 0.0, 0.0, 1.0);
    EXPECT_EQ(apply_pseudodiff(H, TauMeasure::uniform(), psi, 0.0).samples.norm(), 0.0);
    // H >= 0 here and bounded by max V + max T on the grid
    const double bound = 0.5 * 16 + 0.5 * g.p_nyquist() * g.p_nyquist() + 1;
    const auto full = apply_pseudodiff(H, TauMeasure::uniform(), psi, std::numeric_limits<double>::infinity());
    EXPECT_EQ((apply_pseudodiff(H, TauMeasure::uniform(), psi, bound).samples - full.samples).norm(), 0.0);
    // the retained region grows with E
    std::size_t last = 0;
    for (double E : {0.0, 1.0, 4.0, 16.0, 64.0, bound}) {
        const std::size_t c = cutoff_retained_count(H, TauMeasure::uniform(), g, E);
        EXPECT_GE(c, last);
        last = c;
    }
    EXPECT_EQ(last, static_cast<std::size_t>(g.n()) * g.n() * g.n());
}

TEST(KernelIO, BinaryRoundTrip) {
    const Grid1D g(-1.25, 2.5, 16, 0.3);
    const auto K = kernel_matrix(SymbolFunction::standard(1.0, harmonic_v(1, 2)), g, TauMeasure::uniform());
    const std::string bytes = to_binary(K.entries, g);
    EXPECT_EQ(bytes.size(), 8u * (4 + 2 * 16 * 16));
    EXPECT_EQ(static_cast<unsigned char>(bytes[7]), 0x40); // 16.0 little-endian: sign/exponent byte last
    const auto [M, g2] = matrix_from_binary(bytes);
    EXPECT_EQ(g2, g);
    EXPECT_EQ(M, K.entries);
    EXPECT_THROW(matrix_from_binary(bytes.substr(0, bytes.size() - 3)), Error);

    const auto psi = WaveFunction::gaussian(g, 0.5, 1.0, 0.4);
    const auto psi2 = wavefunction_from_binary(to_binary(psi));
    EXPECT_EQ(psi2.samples, psi.samples);
}

TEST(KernelIO, CsvRoundTrip) {
    const Grid1D g(-1, 1, 8, 1.0);
    const auto K = short_time_kernel(SymbolFunction::standard(1.0, harmonic_v(1, 1)), g, 0.1, TauMeasure::weyl());
    const std::string text = to_csv(K.entries, g);
    EXPECT_EQ(text.rfind("# n=8,q_min=-1,q_max=1,hbar=1\n", 0), 0u);
    const auto [M, g2] = matrix_from_csv(text);
    EXPECT_EQ(g2, g);
    EXPECT_EQ(M, K.entries);
    const auto psi = WaveFunction::gaussian(g, 0.1, 0.0, 0.3);
    EXPECT_EQ(wavefunction_from_csv(to_csv(psi)).samples, psi.samples);
    EXPECT_THROW(matrix_from_csv("# n=8,q_min=-1,q_max=1,hbar=1\n1,2,x\n"), ParseError);
}
