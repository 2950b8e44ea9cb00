#pragma once

// Scalars: GMP integers and canonical rationals.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace mahlercf {

using Integer = mpz_class;
using Rational = mpq_class;  // gmpxx keeps results of arithmetic in lowest terms

inline Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) throw InvalidParameter("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational make_rational(long num, long den = 1) {
    return make_rational(Integer(num), Integer(den));
}

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline Integer parse_integer(std::string_view text) {
    std::string s = trim(text);
    if (!s.empty() && s.front() == '+') s.erase(0, 1);
    Integer z;
    if (s.empty() || z.set_str(s, 10) != 0) throw InvalidParameter("not an integer: '" + std::string(text) + "'");
    return z;
}

/// Accepts "num/den" or a bare integer.
inline Rational parse_rational(std::string_view text) {
    std::string s = trim(text);
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(parse_integer(s));
    return make_rational(parse_integer(s.substr(0, slash)), parse_integer(s.substr(slash + 1)));
}

inline std::string to_string(const Integer& z) { return z.get_str(); }

/// "num/den", or just "num" when the denominator is 1.
inline std::string to_string(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Integer ipow(const Integer& base, unsigned long e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Rational rpow(const Rational& base, unsigned long e) {
    Rational r(ipow(base.get_num(), e), ipow(base.get_den(), e));
    r.canonicalize();
    return r;
}

inline Integer powmod(const Integer& base, const Integer& e, const Integer& m) {
    Integer r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

/// Least non-negative residue.
inline Integer mod(const Integer& a, const Integer& m) {
    Integer r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline Integer gcd(const Integer& a, const Integer& b) {
    Integer r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Integer lcm(const Integer& a, const Integer& b) {
    Integer r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

/// Decimal rendering truncated (not rounded) to `digits` places; for humans only.
inline std::string to_decimal(const Rational& r, unsigned digits) {
    Integer num = abs(r.get_num());
    const Integer& den = r.get_den();
    Integer ip = num / den;
    Integer frac = num % den;
    std::string out = (r < 0 ? "-" : "") + ip.get_str();
    if (digits == 0) return out;
    out += '.';
    for (unsigned i = 0; i < digits; ++i) {
        frac *= 10;
        Integer digit = frac / den;
        frac %= den;
        out += static_cast<char>('0' + digit.get_ui());
    }
    return out;
}

}  // namespace mahlercf
