// Short-time action of the harmonic oscillator: closed-form series
// coefficients against a float128 least-squares fit of BVP actions, and the
// three routes to the eps^5 coefficient against the exact Taylor series.

#include <cstdio>

#include "ordo/classical/series.hpp"

int main() {
    using namespace ordo::classical;
    const double m = 1.0, omega = 1.0, q_A = 0.0, q_B = 1.0;
    const HamiltonianSpec H(m, Potential::harmonic(omega, m));

    const auto series = action_series(H, q_A, q_B);
    const auto fit = fit_series_numeric(H, q_A, q_B, default_eps_sweep());
    const auto taylor = exact_action_taylor(ExactKind::Harmonic, m, omega, q_A, q_B);

    std::printf("%6s %18s %18s %12s\n", "order", "series", "fit", "noise floor");
    for (int k = -1; k <= 5; ++k)
        std::printf("%6d %18.12g %18.12g %12.3e\n", k, series.coefficient(k), fit.coefficient(k), fit.noise_floor(k));

    std::printf("\neps^5 routes (exact Taylor coefficient %.12g)\n", taylor.at(5));
    const auto c5 = *series.c5_candidates;
    for (std::size_t i = 0; i < c5.candidates.size(); ++i) {
        const auto& c = c5.candidates[i];
        std::printf("  (%s) %-48s %.12g%s\n", c.label.c_str(), c.route.c_str(), c.value,
                    i == c5.designated ? "  <- designated" : "");
    }
}
