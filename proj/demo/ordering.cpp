// Normal-ordered forms of q^2 p^2 and q^3 p under several tau measures.
// Measures with mean 1/2 agree on every symbol linear in p; they first
// differ at p^2.

#include <cstdio>
#include <vector>

#include "ordo/opalg/quantize.hpp"

int main() {
    using namespace ordo;
    using opalg::TauMeasure;
    const std::vector<TauMeasure> measures{
        TauMeasure::point_mass(Rational(0)), TauMeasure::weyl(), TauMeasure::uniform(),
        TauMeasure::mixture({{Rational(1, 2), Rational(1, 4)}, {Rational(1, 2), Rational(3, 4)}})};

    for (const auto& [s, r] : {std::pair{2, 2}, std::pair{3, 1}}) {
        std::printf("q^%d p^%d\n", s, r);
        for (const auto& P : measures)
            std::printf("  %-22s %s\n", opalg::to_string(P).c_str(),
                        opalg::to_string(opalg::quantize_monomial(s, r, P)).c_str());
    }

    std::printf("\nbracket rule (1/i hbar)[q^3/3, p^3/3] = %s\n", opalg::to_string(opalg::bj_product_rule(2, 2)).c_str());
}
