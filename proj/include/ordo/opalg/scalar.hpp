#pragma once

#include <complex>
#include <map>
#include <string>

#include "ordo/core/rational.hpp"

namespace ordo::opalg {

/// Exact complex number with rational parts.
struct ComplexRational {
    Rational re{0};
    Rational im{0};

    ComplexRational() = default;
    ComplexRational(Rational r) : re(std::move(r)) {}
    ComplexRational(int r) : re(r) {}
    ComplexRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    static ComplexRational i() { return {Rational(0), Rational(1)}; }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    ComplexRational conj() const { return {re, -im}; }

    ComplexRational& operator+=(const ComplexRational& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    ComplexRational& operator-=(const ComplexRational& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    ComplexRational& operator*=(const ComplexRational& o) {
        Rational r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    ComplexRational& operator/=(const ComplexRational& o) {
        const Rational d = o.re * o.re + o.im * o.im;
        Rational r = (re * o.re + im * o.im) / d;
        im = (im * o.re - re * o.im) / d;
        re = std::move(r);
        return *this;
    }

    friend ComplexRational operator+(ComplexRational a, const ComplexRational& b) { return a += b; }
    friend ComplexRational operator-(ComplexRational a, const ComplexRational& b) { return a -= b; }
    friend ComplexRational operator*(ComplexRational a, const ComplexRational& b) { return a *= b; }
    friend ComplexRational operator/(ComplexRational a, const ComplexRational& b) { return a /= b; }
    friend ComplexRational operator-(const ComplexRational& a) { return {-a.re, -a.im}; }
    friend bool operator==(const ComplexRational& a, const ComplexRational& b) { return a.re == b.re && a.im == b.im; }

    std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }
};

/// Canonical text: `r`, `r*i`, or `(r+s*i)`.
inline std::string to_string(const ComplexRational& c) {
    if (c.im == 0) return ordo::to_string(c.re);
    if (c.re == 0) return ordo::to_string(c.im) + "*i";
    const std::string sign = c.im < 0 ? "-" : "+";
    return "(" + ordo::to_string(c.re) + sign + ordo::to_string(c.im < 0 ? Rational(-c.im) : c.im) + "*i)";
}

/// Polynomial in hbar with exact complex coefficients: sum_k c_k hbar^k.
///
/// Zero coefficients are never stored, so `terms().empty()` is exactly zero.
class ExactScalar {
public:
    ExactScalar() = default;
    ExactScalar(ComplexRational c, int hbar_power = 0) { add(hbar_power, std::move(c)); }
    ExactScalar(Rational r) : ExactScalar(ComplexRational(std::move(r))) {}
    ExactScalar(int r) : ExactScalar(ComplexRational(r)) {}

    /// i*hbar, the value of [q, p].
    static ExactScalar i_hbar() { return ExactScalar(ComplexRational::i(), 1); }

    const std::map<int, ComplexRational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    ComplexRational coeff(int k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? ComplexRational{} : it->second;
    }

    int min_power() const { return terms_.empty() ? 0 : terms_.begin()->first; }
    int max_power() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }

    void add(int k, const ComplexRational& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    ExactScalar& operator+=(const ExactScalar& o) {
        for (const auto& [k, c] : o.terms_) add(k, c);
        return *this;
    }
    ExactScalar& operator-=(const ExactScalar& o) {
        for (const auto& [k, c] : o.terms_) add(k, -c);
        return *this;
    }
    friend ExactScalar operator+(ExactScalar a, const ExactScalar& b) { return a += b; }
    friend ExactScalar operator-(ExactScalar a, const ExactScalar& b) { return a -= b; }
    friend ExactScalar operator-(const ExactScalar& a) { return ExactScalar{} - a; }

    friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) {
        ExactScalar r;
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_) r.add(ka + kb, ca * cb);
        return r;
    }
    ExactScalar& operator*=(const ExactScalar& o) { return *this = *this * o; }

    friend bool operator==(const ExactScalar& a, const ExactScalar& b) { return a.terms_ == b.terms_; }

    ExactScalar conj() const {
        ExactScalar r;
        for (const auto& [k, c] : terms_) r.terms_.emplace(k, c.conj());
        return r;
    }

    /// Multiplies by hbar^shift; the caller guarantees the result has no negative powers.
    ExactScalar shift_hbar(int shift) const {
        ExactScalar r;
        for (const auto& [k, c] : terms_) r.terms_.emplace(k + shift, c);
        return r;
    }

    std::complex<double> evaluate(double hbar) const {
        std::complex<double> s{0.0, 0.0};
        for (const auto& [k, c] : terms_) s += c.to_complex() * std::pow(hbar, k);
        return s;
    }

private:
    std::map<int, ComplexRational> terms_;
};

} // namespace ordo::opalg
