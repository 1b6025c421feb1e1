#pragma once

#include "ordo/core/error.hpp"
#include "ordo/opalg/measure.hpp"
#include "ordo/opalg/operator_poly.hpp"
#include "ordo/opalg/symbol.hpp"

namespace ordo::opalg {

/// Averaged tau-rule applied to q^s p^r:
/// sum_m C(r, m) E_P[(1 - tau)^m tau^(r - m)] p^(r - m) q^s p^m.
inline OperatorPoly quantize_monomial(int s, int r, const TauMeasure& P) {
    if (s < 0 || r < 0) throw DomainError("quantize_monomial requires s, r >= 0");
    const OperatorPoly qs = OperatorPoly::monomial(s, 0);
    OperatorPoly out;
    for (int m = 0; m <= r; ++m) {
        const Rational w = binomial(r, m) * tau_moment(P, m, r);
        if (w == 0) continue;
        const OperatorPoly word = op_mul(op_mul(OperatorPoly::monomial(0, r - m), qs), OperatorPoly::monomial(0, m));
        out += ExactScalar(w) * word;
    }
    return out;
}

inline OperatorPoly quantize_poly(const PolySymbol& f, const TauMeasure& P) {
    OperatorPoly out;
    for (const auto& [m, c] : f.terms()) out += ExactScalar(c) * quantize_monomial(m.q_power, m.p_power, P);
    return out;
}

/// (1 / i hbar) [q^(n+1) / (n+1), p^(r+1) / (r+1)], the commutator form of
/// Born-Jordan applied to q^n p^r.
inline OperatorPoly bj_product_rule(int n, int r) {
    if (n < 0 || r < 0) throw DomainError("bj_product_rule requires n, r >= 0");
    const OperatorPoly phi = ExactScalar(Rational(1, n + 1)) * OperatorPoly::monomial(n + 1, 0);
    const OperatorPoly psi = ExactScalar(Rational(1, r + 1)) * OperatorPoly::monomial(0, r + 1);
    const OperatorPoly c = commutator(phi, psi);
    if (!c.is_zero() && c.min_hbar_power() < 1)
        throw Error("commutator has an hbar^0 term; hbar grading violated");
    // divide by i: multiply by -i, then drop one power of hbar
    return ExactScalar(ComplexRational(Rational(0), Rational(-1))) * c.shift_hbar(-1);
}

/// q-sandwich form sum_{k=0}^{n} q^k p^r q^(n-k) / (n + 1).
inline OperatorPoly bj_sandwich(int n, int r) {
    OperatorPoly out;
    const OperatorPoly pr = OperatorPoly::monomial(0, r);
    for (int k = 0; k <= n; ++k)
        out += op_mul(op_mul(OperatorPoly::monomial(k, 0), pr), OperatorPoly::monomial(n - k, 0));
    return ExactScalar(Rational(1, n + 1)) * out;
}

} // namespace ordo::opalg
