#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ordo/core/error.hpp"
#include "ordo/opalg/scalar.hpp"

namespace ordo::opalg {

enum class Letter : char { Q = 'Q', P = 'P' };

/// Finite product of canonical operators, read left to right. Empty is the identity.
struct Word {
    std::vector<Letter> letters;

    Word() = default;
    Word(std::initializer_list<Letter> l) : letters(l) {}
    explicit Word(std::vector<Letter> l) : letters(std::move(l)) {}

    /// Builds a word from a string over {Q, P} such as "PPQQ".
    static Word from_string(std::string_view s) {
        Word w;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == 'Q' || s[i] == 'q') w.letters.push_back(Letter::Q);
            else if (s[i] == 'P' || s[i] == 'p') w.letters.push_back(Letter::P);
            else throw ParseError("word letters must be Q or P", 1, i + 1);
        }
        return w;
    }

    std::size_t size() const { return letters.size(); }

    friend Word operator+(Word a, const Word& b) {
        a.letters.insert(a.letters.end(), b.letters.begin(), b.letters.end());
        return a;
    }
};

/// Key of a canonical monomial q^a p^b.
struct Monomial {
    int q_power = 0;
    int p_power = 0;
    friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

/// sum c_{a,b}(hbar) q^a p^b with every q to the left of every p.
class OperatorPoly {
public:
    using Terms = std::map<Monomial, ExactScalar>;

    OperatorPoly() = default;

    static OperatorPoly identity() { return monomial(0, 0); }
    static OperatorPoly q() { return monomial(1, 0); }
    static OperatorPoly p() { return monomial(0, 1); }
    static OperatorPoly monomial(int a, int b, ExactScalar c = ExactScalar(1)) {
        OperatorPoly r;
        r.add({a, b}, c);
        return r;
    }
    static OperatorPoly scalar(ExactScalar c) { return monomial(0, 0, std::move(c)); }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    ExactScalar coeff(int a, int b) const {
        auto it = terms_.find({a, b});
        return it == terms_.end() ? ExactScalar{} : it->second;
    }

    void add(Monomial m, const ExactScalar& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    OperatorPoly& operator+=(const OperatorPoly& o) {
        for (const auto& [m, c] : o.terms_) add(m, c);
        return *this;
    }
    OperatorPoly& operator-=(const OperatorPoly& o) {
        for (const auto& [m, c] : o.terms_) add(m, -c);
        return *this;
    }
    friend OperatorPoly operator+(OperatorPoly a, const OperatorPoly& b) { return a += b; }
    friend OperatorPoly operator-(OperatorPoly a, const OperatorPoly& b) { return a -= b; }

    friend OperatorPoly operator*(const ExactScalar& s, const OperatorPoly& a) {
        OperatorPoly r;
        for (const auto& [m, c] : a.terms_) r.add(m, s * c);
        return r;
    }

    friend bool operator==(const OperatorPoly& a, const OperatorPoly& b) { return a.terms_ == b.terms_; }

    /// Multiplies every coefficient by hbar^shift.
    OperatorPoly shift_hbar(int shift) const {
        OperatorPoly r;
        for (const auto& [m, c] : terms_) r.terms_.emplace(m, c.shift_hbar(shift));
        return r;
    }

    /// Smallest hbar power over all terms (0 for the zero polynomial).
    int min_hbar_power() const {
        bool first = true;
        int lo = 0;
        for (const auto& [m, c] : terms_) {
            if (first || c.min_power() < lo) lo = c.min_power();
            first = false;
        }
        return lo;
    }

private:
    Terms terms_;
};

/// Product (q^a1 p^b1)(q^a2 p^b2) in canonical order, using
/// p^b q^c = sum_j j! C(b,j) C(c,j) (-i hbar)^j q^(c-j) p^(b-j).
inline OperatorPoly op_mul(const OperatorPoly& x, const OperatorPoly& y) {
    OperatorPoly r;
    const ComplexRational minus_i{Rational(0), Rational(-1)};
    for (const auto& [mx, cx] : x.terms()) {
        for (const auto& [my, cy] : y.terms()) {
            const ExactScalar cxy = cx * cy;
            const int b = mx.p_power;
            const int c = my.q_power;
            ComplexRational phase(1);
            for (int j = 0; j <= std::min(b, c); ++j) {
                const Rational weight = factorial(j) * binomial(b, j) * binomial(c, j);
                r.add({mx.q_power + c - j, b - j + my.p_power},
                      ExactScalar(phase * ComplexRational(weight), j) * cxy);
                phase *= minus_i;
            }
        }
    }
    return r;
}

inline OperatorPoly operator*(const OperatorPoly& x, const OperatorPoly& y) { return op_mul(x, y); }

/// Canonical form of a word under p q -> q p - i hbar.
inline OperatorPoly normal_order(const Word& w) {
    OperatorPoly r = OperatorPoly::identity();
    for (const Letter l : w.letters) r = op_mul(r, l == Letter::Q ? OperatorPoly::q() : OperatorPoly::p());
    return r;
}

inline OperatorPoly commutator(const OperatorPoly& a, const OperatorPoly& b) { return op_mul(a, b) - op_mul(b, a); }

inline OperatorPoly power(const OperatorPoly& a, int n) {
    OperatorPoly r = OperatorPoly::identity();
    for (int i = 0; i < n; ++i) r = op_mul(r, a);
    return r;
}

/// Formal adjoint: (c q^a p^b)^dagger = conj(c) p^b q^a, re-ordered canonically.
inline OperatorPoly adjoint(const OperatorPoly& a) {
    OperatorPoly r;
    for (const auto& [m, c] : a.terms()) {
        r += c.conj() * op_mul(OperatorPoly::monomial(0, m.p_power), OperatorPoly::monomial(m.q_power, 0));
    }
    return r;
}

namespace detail {

inline std::string factor(const char* name, int e) {
    if (e == 1) return name;
    return std::string(name) + "^" + std::to_string(e);
}

} // namespace detail

/// Canonical text form: terms `coeff * hbar^k * q^a * p^b` sorted by (a, b, k),
/// joined by ` + `. Factors with exponent 0 are omitted, exponent 1 is written bare.
inline std::string to_string(const OperatorPoly& a) {
    if (a.is_zero()) return "0";
    std::string out;
    for (const auto& [m, s] : a.terms()) {
        for (const auto& [k, c] : s.terms()) {
            if (!out.empty()) out += " + ";
            out += to_string(c);
            if (k != 0) out += " * " + detail::factor("hbar", k);
            if (m.q_power != 0) out += " * " + detail::factor("q", m.q_power);
            if (m.p_power != 0) out += " * " + detail::factor("p", m.p_power);
        }
    }
    return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
}

inline ComplexRational parse_complex(std::string_view s, std::size_t col) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
        const std::string_view body = s.substr(1, s.size() - 2);
        // split at the sign that starts the imaginary part (not a leading sign or exponent sign)
        for (std::size_t i = body.size(); i-- > 1;) {
            if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
                const ComplexRational re(parse_rational(body.substr(0, i), col + 1));
                ComplexRational im = parse_complex(body.substr(i), col + 1 + i);
                if (im.re != 0) break;
                return re + im;
            }
        }
        throw ParseError("malformed complex coefficient", 1, col + 1);
    }
    if (s.size() >= 2 && s.substr(s.size() - 2) == "*i") {
        std::string_view r = s.substr(0, s.size() - 2);
        if (!r.empty() && r.front() == '+') r.remove_prefix(1);
        return {Rational(0), parse_rational(r, col)};
    }
    return ComplexRational(parse_rational(s, col));
}

} // namespace detail

/// Inverse of `to_string(const OperatorPoly&)`.
inline OperatorPoly parse_operator_poly(std::string_view text) {
    OperatorPoly r;
    text = detail::trim(text);
    if (text == "0") return r;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find(" + ", pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view term = text.substr(pos, end - pos);
        std::size_t fpos = 0;
        ComplexRational coeff;
        int k = 0, a = 0, b = 0;
        bool first = true;
        while (fpos <= term.size()) {
            std::size_t fend = term.find(" * ", fpos);
            if (fend == std::string_view::npos) fend = term.size();
            const std::string_view f = detail::trim(term.substr(fpos, fend - fpos));
            const std::size_t col = pos + fpos;
            if (first) {
                coeff = detail::parse_complex(f, col);
                first = false;
            } else {
                const std::size_t caret = f.find('^');
                const std::string_view name = f.substr(0, caret);
                int e = 1;
                if (caret != std::string_view::npos) {
                    const Rational er = parse_rational(f.substr(caret + 1), col + caret + 1);
                    if (boost::multiprecision::denominator(er) != 1 || er < 0)
                        throw ParseError("exponent must be a non-negative integer", 1, col + caret + 2);
                    e = static_cast<int>(er);
                }
                if (name == "hbar") k += e;
                else if (name == "q") a += e;
                else if (name == "p") b += e;
                else throw ParseError("unknown factor '" + std::string(name) + "'", 1, col + 1);
            }
            if (fend == term.size()) break;
            fpos = fend + 3;
        }
        r.add({a, b}, ExactScalar(coeff, k));
        if (end == text.size()) break;
        pos = end + 3;
    }
    return r;
}

} // namespace ordo::opalg
