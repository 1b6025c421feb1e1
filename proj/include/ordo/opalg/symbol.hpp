#pragma once

#include <cctype>
#include <map>
#include <string>
#include <string_view>

#include "ordo/core/error.hpp"
#include "ordo/opalg/operator_poly.hpp"
#include "ordo/opalg/scalar.hpp"

namespace ordo::opalg {

/// Classical polynomial symbol sum c_{s,r} q^s p^r.
class PolySymbol {
public:
    using Terms = std::map<Monomial, ComplexRational>;

    PolySymbol() = default;

    static PolySymbol monomial(int s, int r, ComplexRational c = ComplexRational(1)) {
        PolySymbol f;
        f.add({s, r}, std::move(c));
        return f;
    }
    static PolySymbol constant(ComplexRational c) { return monomial(0, 0, std::move(c)); }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    bool is_real() const {
        for (const auto& [m, c] : terms_)
            if (!c.is_real()) return false;
        return true;
    }

    ComplexRational coeff(int s, int r) const {
        auto it = terms_.find({s, r});
        return it == terms_.end() ? ComplexRational{} : it->second;
    }

    void add(Monomial m, const ComplexRational& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    PolySymbol& operator+=(const PolySymbol& o) {
        for (const auto& [m, c] : o.terms_) add(m, c);
        return *this;
    }
    friend PolySymbol operator+(PolySymbol a, const PolySymbol& b) { return a += b; }
    friend PolySymbol operator-(PolySymbol a, const PolySymbol& b) {
        for (const auto& [m, c] : b.terms_) a.add(m, -c);
        return a;
    }
    friend PolySymbol operator*(const PolySymbol& a, const PolySymbol& b) {
        PolySymbol r;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) r.add({ma.q_power + mb.q_power, ma.p_power + mb.p_power}, ca * cb);
        return r;
    }
    friend bool operator==(const PolySymbol& a, const PolySymbol& b) { return a.terms_ == b.terms_; }

    PolySymbol d_dq() const {
        PolySymbol r;
        for (const auto& [m, c] : terms_)
            if (m.q_power > 0) r.add({m.q_power - 1, m.p_power}, c * ComplexRational(m.q_power));
        return r;
    }
    PolySymbol d_dp() const {
        PolySymbol r;
        for (const auto& [m, c] : terms_)
            if (m.p_power > 0) r.add({m.q_power, m.p_power - 1}, c * ComplexRational(m.p_power));
        return r;
    }

    std::complex<double> evaluate(double q, double p) const {
        std::complex<double> s{0.0, 0.0};
        for (const auto& [m, c] : terms_) s += c.to_complex() * std::pow(q, m.q_power) * std::pow(p, m.p_power);
        return s;
    }

    int max_p_degree() const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.p_power);
        return d;
    }

private:
    Terms terms_;
};

/// {f, g} = f_q g_p - f_p g_q.
inline PolySymbol poisson_bracket(const PolySymbol& f, const PolySymbol& g) {
    return f.d_dq() * g.d_dp() - f.d_dp() * g.d_dq();
}

/// Renders a symbol in the syntax accepted by parse_symbol, e.g.
/// `3/2 q^2 p^2 - q p + 4`. Complex coefficients are written `(r+s*i)` and
/// are display-only.
inline std::string to_string(const PolySymbol& f) {
    using ordo::to_string;
    if (f.is_zero()) return "0";
    std::string out;
    for (const auto& [m, c] : f.terms()) {
        std::string factors;
        auto factor = [&](char v, int e) {
            if (e == 0) return;
            if (!factors.empty()) factors += ' ';
            factors += v;
            if (e != 1) factors += "^" + std::to_string(e);
        };
        factor('q', m.q_power);
        factor('p', m.p_power);
        std::string coeff;
        bool negative = false;
        if (c.is_real()) {
            negative = c.re < 0;
            const Rational mag = negative ? Rational(-c.re) : c.re;
            if (mag != 1 || factors.empty()) coeff = to_string(mag);
        } else {
            coeff = opalg::to_string(c);
        }
        if (out.empty())
            out += negative ? "-" : "";
        else
            out += negative ? " - " : " + ";
        out += coeff;
        if (!coeff.empty() && !factors.empty()) out += ' ';
        out += factors;
    }
    return out;
}

/// Parses sums of monomials like `q^2p^2`, `3/2 q^2 p + q - 1/4`, `2*q*p`.
///
/// Each term is an optional rational coefficient followed by factors `q`, `p`,
/// each with an optional `^n`. Whitespace and `*` between factors are ignored.
inline PolySymbol parse_symbol(std::string_view s) {
    PolySymbol f;
    std::size_t i = 0;
    auto at_end = [&] { return i >= s.size(); };
    auto skip_ws = [&] {
        while (!at_end() && (s[i] == ' ' || s[i] == '\t')) ++i;
    };
    auto fail = [&](const std::string& msg) -> PolySymbol { throw ParseError("symbol: " + msg, 1, i + 1); };
    auto read_int = [&]() -> int {
        const std::size_t start = i;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (start == i) fail("expected exponent digits");
        return std::stoi(std::string(s.substr(start, i - start)));
    };

    skip_ws();
    if (at_end()) return fail("empty symbol");
    bool first_term = true;
    while (true) {
        skip_ws();
        if (at_end()) break;
        Rational sign(1);
        if (s[i] == '+' || s[i] == '-') {
            if (s[i] == '-') sign = -1;
            ++i;
            skip_ws();
        } else if (!first_term) {
            return fail("expected '+' or '-' between terms");
        }
        first_term = false;
        Rational coeff(1);
        if (!at_end() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) {
            const std::size_t start = i;
            while (!at_end() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.' || s[i] == '/')) ++i;
            coeff = parse_rational(s.substr(start, i - start), start);
        }
        int qs = 0, ps = 0;
        bool any_factor = false;
        while (true) {
            skip_ws();
            if (!at_end() && s[i] == '*') {
                ++i;
                skip_ws();
            }
            if (at_end() || (s[i] != 'q' && s[i] != 'p')) break;
            const char v = s[i++];
            int e = 1;
            if (!at_end() && s[i] == '^') {
                ++i;
                e = read_int();
            }
            (v == 'q' ? qs : ps) += e;
            any_factor = true;
        }
        if (!any_factor && coeff == 1 && sign == 1 && !at_end() && s[i] != '+' && s[i] != '-')
            return fail(std::string("unexpected character '") + s[i] + "'");
        f.add({qs, ps}, ComplexRational(sign * coeff));
        skip_ws();
        if (!at_end() && s[i] != '+' && s[i] != '-') return fail(std::string("unexpected character '") + s[i] + "'");
    }
    return f;
}

} // namespace ordo::opalg
