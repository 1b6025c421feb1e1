#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ordo/propagator/studies.hpp"

using namespace ordo;
using namespace ordo::propagator;
using classical::Potential;

namespace {

HamiltonianSpec harmonic(double m = 1.0, double w = 1.0) { return HamiltonianSpec(m, Potential::harmonic(w, m)); }
HamiltonianSpec free_particle(double m = 1.0) { return HamiltonianSpec(m, Potential::free()); }

const std::vector<SliceScheme> kSchemes = {SliceScheme::left(), SliceScheme::midpoint(), SliceScheme::uniform_bj()};

/// Smaller grid than the benchmark to keep the unit suite fast.
Grid1D test_grid() { return Grid1D(-8.0, 8.0, 256); }

} // namespace

TEST(Scheme, MapsOntoMeasures) {
    EXPECT_EQ(SliceScheme::left().measure(), opalg::TauMeasure::point_mass(Rational(0)));
    EXPECT_EQ(SliceScheme::right().measure(), opalg::TauMeasure::point_mass(Rational(1)));
    EXPECT_EQ(SliceScheme::midpoint().measure(), opalg::TauMeasure::weyl());
    EXPECT_EQ(SliceScheme::uniform_bj().measure(), opalg::TauMeasure::uniform());
    EXPECT_EQ(parse_scheme("weyl").kind(), SliceScheme::Kind::Midpoint);
    EXPECT_EQ(parse_scheme("bj").name(), "bj");
    EXPECT_EQ(parse_scheme("tau:0").kind(), SliceScheme::Kind::Left);
    const auto mix = parse_scheme("mix:1/2@1/4,1/2@3/4");
    EXPECT_EQ(mix.kind(), SliceScheme::Kind::Mixture);
    EXPECT_EQ(SliceScheme::from_measure(mix.measure()), mix);
    EXPECT_THROW(parse_scheme("centre"), ParseError);
}

TEST(Slice, FreeKernelIsSchemeIndependent) {
    const auto g = test_grid();
    const auto ref = slice_kernel(free_particle(), g, 0.3, SliceScheme::left()).entries;
    for (const auto& s : {SliceScheme::right(), SliceScheme::midpoint(), SliceScheme::uniform_bj()})
        EXPECT_EQ((slice_kernel(free_particle(), g, 0.3, s).entries - ref).norm(), 0.0) << s.name();
}

TEST(Slice, MidpointAndUniformDifferByOneTwentyFourth) {
    const auto H = harmonic();
    const double dt = 0.05;
    const double mid = slice_exponent<double>(H, 0.0, 1.0, dt, SliceScheme::midpoint());
    const double bj = slice_exponent<double>(H, 0.0, 1.0, dt, SliceScheme::uniform_bj());
    EXPECT_NEAR(mid - bj, (1.0 / 6 - 1.0 / 8) * dt, 1e-15);
}

TEST(Slice, KineticPhaseDoublesWhenDtHalves) {
    const auto H = free_particle(1.3);
    const double a = slice_exponent<double>(H, -0.2, 0.9, 0.1, SliceScheme::left());
    const double b = slice_exponent<double>(H, -0.2, 0.9, 0.05, SliceScheme::left());
    EXPECT_NEAR(b, 2 * a, 1e-12);
    const auto g = test_grid();
    const auto K1 = slice_kernel(H, g, 0.1, SliceScheme::left());
    const auto K2 = slice_kernel(H, g, 0.05, SliceScheme::left());
    // at fixed (i, j) the unwrapped phase of the exponent doubles
    const int i = 140, j = 128;
    const double d = g.q(i) - g.q(j);
    const double phase = std::arg(K1.entries(i, j)) + std::numbers::pi / 4;
    EXPECT_NEAR(std::remainder(phase - H.m * d * d / 0.2, 2 * std::numbers::pi), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(K2.entries(i, j)) / std::abs(K1.entries(i, j)), std::sqrt(2.0), 1e-12);
}

TEST(Slice, RejectsMagneticHamiltonians) {
    const HamiltonianSpec H(1.0, Potential::free(), Potential::polynomial({0.2}));
    EXPECT_THROW(slice_kernel(H, test_grid(), 0.1, SliceScheme::left()), UnsupportedSymbol);
    EXPECT_THROW(band_limited_slice(H, test_grid(), 0.1, SliceScheme::left()), UnsupportedSymbol);
    EXPECT_THROW(SpectralReference(H, test_grid()), UnsupportedSymbol);
}

TEST(Compose, SingleSliceIsTheSliceItself) {
    const auto g = test_grid();
    const auto H = harmonic();
    EXPECT_EQ((compose_slices(H, g, 0.2, 1, SliceScheme::midpoint()).entries -
               band_limited_slice(H, g, 0.2, SliceScheme::midpoint()).entries)
                  .norm(),
              0.0);
    ComposeOptions closed;
    closed.form = SliceForm::ClosedGaussian;
    EXPECT_EQ((compose_slices(H, g, 0.2, 1, SliceScheme::midpoint(), closed).entries -
               slice_kernel(H, g, 0.2, SliceScheme::midpoint()).entries)
                  .norm(),
              0.0);
}

TEST(Compose, FreeCompositionIsSemigroup) {
    const auto g = test_grid();
    const auto one = band_limited_slice(free_particle(), g, 0.5, SliceScheme::uniform_bj()).entries;
    for (int N : {2, 7, 64}) {
        const auto U = compose_slices(free_particle(), g, 0.5, N, SliceScheme::uniform_bj()).entries;
        EXPECT_LE((U - one).norm() / one.norm(), 1e-12) << "N=" << N;
    }
}

TEST(Compose, BinaryPoweringMatchesRepeatedProducts) {
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Random(12, 12) * 0.3;
    Eigen::MatrixXcd R = Eigen::MatrixXcd::Identity(12, 12);
    for (int k = 0; k < 11; ++k) R = R * K;
    EXPECT_LE((matrix_power(K, 11) - R).norm(), 1e-12 * R.norm());
    EXPECT_EQ((matrix_power(K, 0) - Eigen::MatrixXcd::Identity(12, 12)).norm(), 0.0);
}

TEST(Compose, HarmonicRefinementApproachesReference) {
    const auto g = test_grid();
    const auto H = harmonic();
    const auto Uref = reference_propagator(H, g, 0.5).entries;
    const auto B = low_momentum_basis(g);
    const double d8 = low_momentum_distance(compose_slices(H, g, 0.5, 8, SliceScheme::midpoint()).entries, Uref, B);
    const double d64 = low_momentum_distance(compose_slices(H, g, 0.5, 64, SliceScheme::midpoint()).entries, Uref, B);
    EXPECT_LT(d64, d8);
}

TEST(Compose, ClosedGaussianCompositionIsUnstable) {
    // documents why composition uses the band-limited slice
    const auto g = test_grid();
    ComposeOptions closed;
    closed.form = SliceForm::ClosedGaussian;
    closed.track_unitarity = true;
    const auto U = compose_slices(harmonic(), g, 0.5, 32, SliceScheme::midpoint(), closed);
    EXPECT_GT(*U.unitarity_defect, 1.0);
}

TEST(Reference, ZeroTimeIsIdentity) {
    const auto g = test_grid();
    const auto U = reference_propagator(harmonic(), g, 0.0);
    EXPECT_LE((U.entries - Eigen::MatrixXcd::Identity(g.n(), g.n())).norm(), 1e-12);
}

TEST(Reference, FreeIsMomentumMultiplier) {
    const auto g = test_grid();
    const double T = 0.7;
    const SpectralReference ref(free_particle(), g);
    for (int k : {0, 50, 128, 200, 255}) {
        const auto pw = WaveFunction::plane_wave(g, k);
        const auto out = ref.apply(T, pw);
        const cplx phase = std::polar(1.0, -g.p(k) * g.p(k) * T / 2);
        EXPECT_LE((out.samples - phase * pw.samples).norm(), 1e-10) << "k=" << k;
    }
}

TEST(Reference, CompositionAndUnitarity) {
    const auto g = test_grid();
    const SpectralReference ref(harmonic(), g);
    const auto U1 = ref.matrix(0.3), U2 = ref.matrix(0.45), U12 = ref.matrix(0.75);
    EXPECT_LE((U1 * U2 - U12).norm() / U12.norm(), 1e-9);
    EXPECT_LE(*reference_propagator(harmonic(), g, 0.75).unitarity_defect, 1e-10);
}

TEST(Convergence, FreeSchemesCoincide) {
    const auto g = test_grid();
    const auto rep = convergence_study(free_particle(), g, 0.5, kSchemes, {1, 2, 4, 8});
    for (double d : rep.max_pairwise) EXPECT_LE(d, 1e-12);
    for (const auto& s : rep.schemes)
        for (double d : s.distance) EXPECT_LE(d, 1e-10) << s.scheme;
}

TEST(Convergence, HarmonicSchemesApproachCommonLimit) {
    const auto g = test_grid();
    const auto rep = convergence_study(harmonic(), g, 0.5, kSchemes, {8, 16, 32, 64});
    for (const auto& s : rep.schemes) {
        EXPECT_TRUE(s.monotone) << s.scheme;
        ASSERT_TRUE(s.rate);
        EXPECT_LT(s.rate->slope, 0.0) << s.scheme;
    }
    EXPECT_GE(rep.pairwise_reduction(), 4.0);
    EXPECT_THROW(convergence_study(harmonic(), g, 0.5, kSchemes, {8, 16, 32}), DomainError);
    EXPECT_THROW(convergence_study(harmonic(), g, 0.5, kSchemes, {8, 16, 16, 32}), DomainError);
}

TEST(Invariants, TimeReversalOnLowMomentumSubspace) {
    const Grid1D g(-8.0, 8.0, 512);
    const auto B = low_momentum_basis(g);
    const double dt = 0.5 / 256;
    for (const auto& s : kSchemes) {
        const auto K = band_limited_slice(harmonic(), g, dt, s).entries;
        const Eigen::MatrixXcd D = K * K.adjoint() - Eigen::MatrixXcd::Identity(g.n(), g.n());
        EXPECT_LE(restricted_norm(D, B), 1e-3) << s.name();
    }
}

TEST(Invariants, NormControlForResolvedPackets) {
    // each application loses O(dt^2) norm, so T = 1 in 256 slices stays within 1e-3
    const auto g = test_grid();
    const auto psi = WaveFunction::gaussian(g, 1.0, 0.5, 1.0);
    const int N = 256;
    const double dt = 1.0 / N;
    for (const auto& s : kSchemes) {
        const auto K = band_limited_slice(harmonic(), g, dt, s);
        EXPECT_NEAR(K.apply(psi).norm(), 1.0, 1e-5) << s.name();
        EXPECT_NEAR(compose_slices(harmonic(), g, 1.0, N, s).apply(psi).norm(), 1.0, 1e-3) << s.name();
        const auto F = chernoff_factor(harmonic(), g, dt, s.measure());
        EXPECT_NEAR(WaveFunction(g, F * psi.samples).norm(), 1.0, 1e-5) << s.name();
        EXPECT_NEAR(chernoff_iterate(harmonic(), g, 1.0, N, s.measure(), psi).norm, 1.0, 1e-3) << s.name();
    }
}

TEST(Scaling, FreeHasNoPhaseError) {
    const auto rep = short_time_phase_scaling(free_particle(), 0.0, 1.0, default_dt_sweep(), kSchemes);
    for (const auto& s : rep.schemes) {
        for (double e : s.phase_error) EXPECT_LT(e, 1e-10) << s.scheme;
        EXPECT_FALSE(s.slope);
    }
}

TEST(Scaling, UniformOnLinearForceIsExactlyCubic) {
    const double F = 1.5, m = 1.2;
    const HamiltonianSpec H(m, Potential::linear(F));
    const auto rep = short_time_phase_scaling(H, 0.0, 1.0, default_dt_sweep(), {SliceScheme::uniform_bj()});
    const auto& s = rep.scheme("bj");
    for (std::size_t k = 0; k < rep.dt.size(); ++k)
        EXPECT_LE(std::abs(s.phase_error[k] - F * F / (24 * m) * std::pow(rep.dt[k], 3)) /
                      (F * F / (24 * m) * std::pow(rep.dt[k], 3)),
                  1e-10);
    EXPECT_NEAR(s.slope->slope, 3.0, 1e-9);
}

TEST(Scaling, HarmonicSeparatesUniformFromMidpoint) {
    const auto rep = short_time_phase_scaling(harmonic(), 0.0, 1.0, default_dt_sweep(),
                                              {SliceScheme::left(), SliceScheme::midpoint(), SliceScheme::uniform_bj()});
    EXPECT_GE(rep.scheme("bj").slope->slope, 2.7);
    EXPECT_LE(rep.scheme("midpoint").slope->slope, 1.3);
    EXPECT_LE(rep.scheme("left").slope->slope, 1.3);
    EXPECT_LE(std::abs(rep.scheme("midpoint").eps_coefficient - 1.0 / 24) * 24, 1e-6);
    EXPECT_LE(std::abs(rep.scheme("bj").eps_coefficient), 1e-9);
    // left endpoint: V(q_A) = 0 against avg V = 1/6
    EXPECT_NEAR(rep.scheme("left").eps_coefficient, 1.0 / 6, 1e-9);
    const auto& ci = *rep.scheme("bj").slope;
    EXPECT_LE(ci.ci_low, ci.slope);
    EXPECT_GE(ci.ci_high, ci.slope);
}

TEST(Scaling, RejectsUnsortedSweep) {
    EXPECT_THROW(short_time_phase_scaling(harmonic(), 0.0, 1.0, {0.01, 0.02, 0.03}, kSchemes), DomainError);
    EXPECT_THROW(short_time_phase_scaling(harmonic(), 1.0, 1.0, default_dt_sweep(), kSchemes), DegenerateEndpoints);
}

TEST(Chernoff, SmallTimeLeavesStateNearlyUnchanged) {
    const auto g = test_grid();
    const auto psi = WaveFunction::gaussian(g, 0.5, 0.0, 1.0);
    const SpectralReference ref(harmonic(), g);
    double prev = 0;
    for (double t : {1e-2, 1e-3}) {
        const auto r = chernoff_iterate(harmonic(), g, t, 1, opalg::TauMeasure::uniform(), psi, ref);
        const double moved = r.psi.distance(psi);
        EXPECT_LE(moved, 2 * t);
        if (prev > 0) EXPECT_NEAR(prev / moved, 10.0, 0.5);
        prev = moved;
    }
}

TEST(Chernoff, FreeIsExactForEveryN) {
    const auto g = test_grid();
    const auto psi = WaveFunction::gaussian(g, 0.0, 1.0, 0.8);
    for (int n : {1, 3, 16}) {
        const auto r = chernoff_iterate(free_particle(), g, 0.9, n, opalg::TauMeasure::weyl(), psi);
        EXPECT_LE(r.distance, 1e-10) << "n=" << n;
    }
}

TEST(Chernoff, HarmonicErrorDecreasesWithN) {
    const auto g = test_grid();
    const auto psi = WaveFunction::gaussian(g, 1.0, 0.5, 1.0);
    for (const auto& P : {opalg::TauMeasure::uniform(), opalg::TauMeasure::weyl()}) {
        const auto st = chernoff_study(harmonic(), g, 1.0, {8, 32, 128}, P, psi);
        EXPECT_TRUE(st.monotone) << st.measure;
    }
}

TEST(Fits, LogLogSlopeOfPowerLaw) {
    std::vector<double> x, y;
    for (double v : {0.1, 0.05, 0.02, 0.01}) {
        x.push_back(v);
        y.push_back(3.0 * std::pow(v, 2.5));
    }
    const auto f = fit_loglog(x, y);
    EXPECT_NEAR(f.slope, 2.5, 1e-12);
    EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-10);
    EXPECT_NEAR(f.ci_low, 2.5, 1e-9);
}
