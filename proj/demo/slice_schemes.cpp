// Time-sliced propagators for the harmonic oscillator. In the Trotter limit
// the left, midpoint and uniform slice rules converge to one propagator; at
// fixed dq their short-time phases differ at different orders in dt.

#include <cstdio>

#include "ordo/propagator/studies.hpp"

int main() {
    using namespace ordo;
    using propagator::SliceScheme;
    const classical::HamiltonianSpec H(1.0, classical::Potential::harmonic(1.0, 1.0));
    const kernels::Grid1D grid(-8.0, 8.0, 256);
    const std::vector<SliceScheme> schemes{SliceScheme::left(), SliceScheme::midpoint(), SliceScheme::uniform_bj()};

    const auto conv = propagator::convergence_study(H, grid, 0.5, schemes, {8, 16, 32, 64, 128});
    std::printf("distance to the spectral propagator (T = 0.5, low-momentum subspace)\n%6s", "N");
    for (const auto& s : conv.schemes) std::printf(" %12s", s.scheme.c_str());
    std::printf(" %12s\n", "pairwise");
    for (std::size_t k = 0; k < conv.N.size(); ++k) {
        std::printf("%6d", conv.N[k]);
        for (const auto& s : conv.schemes) std::printf(" %12.4e", s.distance[k]);
        std::printf(" %12.4e\n", conv.max_pairwise[k]);
    }

    const auto sc = propagator::short_time_phase_scaling(H, 0.0, 1.0, propagator::default_dt_sweep(), schemes);
    std::printf("\nphase error at fixed dq = 1\n%10s", "dt");
    for (const auto& s : sc.schemes) std::printf(" %12s", s.scheme.c_str());
    std::printf("\n");
    for (std::size_t k = 0; k < sc.dt.size(); ++k) {
        std::printf("%10.4g", sc.dt[k]);
        for (const auto& s : sc.schemes) std::printf(" %12.4e", s.phase_error[k]);
        std::printf("\n");
    }
    std::printf("%10s", "slope");
    for (const auto& s : sc.schemes) std::printf(" %12.4f", s.slope ? s.slope->slope : 0.0);
    std::printf("\n");
}
