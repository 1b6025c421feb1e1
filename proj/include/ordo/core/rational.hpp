#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "ordo/core/error.hpp"

namespace ordo {

/// Arbitrary precision rational; all exact algebra is built on it.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline Rational binomial(int n, int k) {
    if (k < 0 || k > n) return Rational(0);
    Integer r = 1;
    for (int i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r /= i;
    }
    return Rational(r);
}

inline Rational factorial(int n) {
    Integer r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return Rational(r);
}

inline Rational pow(const Rational& x, int e) {
    Rational r(1);
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

/// `num/den`, or just `num` when the denominator is one.
inline std::string to_string(const Rational& r) {
    const Integer num = boost::multiprecision::numerator(r);
    const Integer den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

inline double to_double(const Rational& r) { return static_cast<double>(r); }

/// Parses `p/q`, an integer, or a finite decimal (`0.25`, `-1.5e-3`) exactly.
inline Rational parse_rational(std::string_view s, std::size_t column_offset = 0) {
    auto fail = [&](std::size_t pos, const std::string& msg) -> Rational {
        throw ParseError("invalid rational '" + std::string(s) + "': " + msg, 1, column_offset + pos + 1);
    };
    if (s.empty()) return fail(0, "empty");
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        const Rational num = parse_rational(s.substr(0, slash), column_offset);
        const Rational den = parse_rational(s.substr(slash + 1), column_offset + slash + 1);
        if (den == 0) return fail(slash + 1, "zero denominator");
        return num / den;
    }
    std::size_t i = 0;
    bool negative = false;
    if (s[i] == '+' || s[i] == '-') {
        negative = s[i] == '-';
        ++i;
    }
    Integer mantissa = 0;
    int scale = 0;
    bool any_digit = false;
    bool seen_point = false;
    for (; i < s.size(); ++i) {
        const char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            mantissa = mantissa * 10 + (c - '0');
            if (seen_point) ++scale;
            any_digit = true;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) return fail(i, "expected digits");
    int exponent = 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        bool eneg = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            eneg = s[i] == '-';
            ++i;
        }
        if (i >= s.size()) return fail(i, "empty exponent");
        for (; i < s.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return fail(i, "bad exponent");
            exponent = exponent * 10 + (s[i] - '0');
            if (exponent > 400) return fail(i, "exponent too large");
        }
        if (eneg) exponent = -exponent;
    }
    if (i != s.size()) return fail(i, "trailing characters");
    const int net = exponent - scale;
    Integer ten = 1;
    for (int k = 0; k < (net < 0 ? -net : net); ++k) ten *= 10;
    Rational r = net >= 0 ? Rational(mantissa * ten) : Rational(mantissa, ten);
    return negative ? Rational(-r) : r;
}

} // namespace ordo
