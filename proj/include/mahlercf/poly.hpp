#pragma once

// Univariate polynomials over Q (sparse) and over Z (dense, integer-primitive form).

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace mahlercf {

using Degree = std::int64_t;

/// Degree of the zero polynomial. Compares below every real degree, negative ones included.
inline constexpr Degree kMinusInfinity = std::numeric_limits<Degree>::min();

/// Sparse polynomial with rational coefficients; zero coefficients are never stored.
class RatPoly {
public:
    using Terms = std::map<Degree, Rational>;

    RatPoly() = default;

    explicit RatPoly(Terms terms) : terms_(std::move(terms)) {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (it->first < 0) throw InvalidParameter("negative exponent in polynomial");
            it = (it->second == 0) ? terms_.erase(it) : std::next(it);
        }
    }

    static RatPoly constant(const Rational& c) { return monomial(c, 0); }

    static RatPoly monomial(const Rational& c, Degree k) {
        RatPoly p;
        if (c != 0) p.terms_.emplace(k, c);
        return p;
    }

    static RatPoly x() { return monomial(Rational(1), 1); }

    /// Coefficients listed from degree 0 upwards.
    static RatPoly from_ascending(const std::vector<Rational>& coeffs) {
        RatPoly p;
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            if (coeffs[i] != 0) p.terms_.emplace(static_cast<Degree>(i), coeffs[i]);
        return p;
    }

    static RatPoly from_ascending(std::initializer_list<long> coeffs) {
        std::vector<Rational> v;
        for (long c : coeffs) v.emplace_back(c);
        return from_ascending(v);
    }

    bool is_zero() const noexcept { return terms_.empty(); }
    Degree degree() const noexcept { return terms_.empty() ? kMinusInfinity : terms_.rbegin()->first; }
    const Terms& terms() const noexcept { return terms_; }

    Rational leading_coefficient() const { return terms_.empty() ? Rational(0) : terms_.rbegin()->second; }

    Rational coefficient(Degree k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    bool is_monic() const { return !is_zero() && leading_coefficient() == 1; }

    RatPoly monic() const {
        if (is_zero()) throw ZeroPolynomial();
        return *this * (Rational(1) / leading_coefficient());
    }

    /// Dense ascending coefficient vector of length degree+1 (empty for zero).
    std::vector<Rational> dense() const {
        std::vector<Rational> v;
        if (is_zero()) return v;
        v.assign(static_cast<std::size_t>(degree()) + 1, Rational(0));
        for (const auto& [k, c] : terms_) v[static_cast<std::size_t>(k)] = c;
        return v;
    }

    Rational evaluate(const Rational& x) const {
        Rational acc(0);
        Degree prev = degree();
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            acc *= rpow(x, static_cast<unsigned long>(prev - it->first));
            acc += it->second;
            prev = it->first;
        }
        if (!is_zero()) acc *= rpow(x, static_cast<unsigned long>(prev));
        return acc;
    }

    RatPoly& operator+=(const RatPoly& o) {
        for (const auto& [k, c] : o.terms_) add_term(k, c);
        return *this;
    }

    RatPoly& operator-=(const RatPoly& o) {
        for (const auto& [k, c] : o.terms_) add_term(k, -c);
        return *this;
    }

    RatPoly& operator*=(const Rational& s) {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [k, c] : terms_) c *= s;
        return *this;
    }

    friend RatPoly operator+(RatPoly a, const RatPoly& b) { return a += b; }
    friend RatPoly operator-(RatPoly a, const RatPoly& b) { return a -= b; }
    friend RatPoly operator*(RatPoly a, const Rational& s) { return a *= s; }
    friend RatPoly operator*(const Rational& s, RatPoly a) { return a *= s; }
    friend RatPoly operator-(RatPoly a) { return a *= Rational(-1); }

    friend RatPoly operator*(const RatPoly& a, const RatPoly& b) {
        RatPoly r;
        for (const auto& [i, ci] : a.terms_)
            for (const auto& [j, cj] : b.terms_) r.add_term(i + j, ci * cj);
        return r;
    }

    friend bool operator==(const RatPoly& a, const RatPoly& b) { return a.terms_ == b.terms_; }

    /// Human-readable form such as "x^2 - 1/2*x + 3".
    std::string to_string() const {
        if (is_zero()) return "0";
        std::string out;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [k, c] = *it;
            Rational mag = abs(c);
            if (out.empty()) {
                if (c < 0) out += "-";
            } else {
                out += (c < 0) ? " - " : " + ";
            }
            bool unit = (mag == 1);
            if (!unit || k == 0) out += mahlercf::to_string(mag);
            if (k > 0) {
                if (!unit) out += "*";
                out += "x";
                if (k > 1) out += "^" + std::to_string(k);
            }
        }
        return out;
    }

private:
    void add_term(Degree k, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Terms terms_;
};

/// Dense integer polynomial, ascending coefficients, no trailing zeros.
struct IntPoly {
    std::vector<Integer> coeffs;

    IntPoly() = default;
    explicit IntPoly(std::vector<Integer> c) : coeffs(std::move(c)) { trim(); }
    IntPoly(std::initializer_list<long> c) {
        for (long v : c) coeffs.emplace_back(v);
        trim();
    }

    bool is_zero() const noexcept { return coeffs.empty(); }
    Degree degree() const noexcept { return coeffs.empty() ? kMinusInfinity : static_cast<Degree>(coeffs.size()) - 1; }
    const Integer& leading_coefficient() const { return coeffs.back(); }

    RatPoly to_rat() const {
        std::vector<Rational> v(coeffs.begin(), coeffs.end());
        return RatPoly::from_ascending(v);
    }

    IntPoly derivative() const {
        std::vector<Integer> d;
        for (std::size_t i = 1; i < coeffs.size(); ++i) d.push_back(coeffs[i] * static_cast<unsigned long>(i));
        return IntPoly(std::move(d));
    }

    /// Comma-separated ascending list, e.g. "1,0,1" for x^2 + 1.
    std::string to_csv() const {
        if (coeffs.empty()) return "0";
        std::string out;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            if (i) out += ",";
            out += coeffs[i].get_str();
        }
        return out;
    }

    friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.coeffs == b.coeffs; }

private:
    void trim() {
        while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
    }
};

/// original = scale * primitive, with primitive of content 1 and positive leading coefficient.
struct IntPolyWithContent {
    IntPoly primitive;
    Rational scale;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

inline std::pair<RatPoly, RatPoly> poly_divmod(const RatPoly& a, const RatPoly& b) {
    if (b.is_zero()) throw DivisionByZeroPoly();
    if (a.degree() < b.degree()) return {RatPoly(), a};

    std::vector<Rational> rem = a.dense();
    std::vector<Rational> div = b.dense();
    const auto db = static_cast<std::size_t>(b.degree());
    const Rational inv_lc = Rational(1) / div[db];
    std::vector<Rational> quo(rem.size() - db, Rational(0));
    for (std::size_t k = rem.size(); k-- > db;) {
        if (rem[k] == 0) continue;
        Rational c = rem[k] * inv_lc;
        quo[k - db] = c;
        for (std::size_t j = 0; j <= db; ++j)
            if (div[j] != 0) rem[k - db + j] -= c * div[j];
    }
    rem.resize(db);
    return {RatPoly::from_ascending(quo), RatPoly::from_ascending(rem)};
}

/// q(x) -> q(x^d).
inline RatPoly poly_substitute_power(const RatPoly& q, Degree d) {
    if (d < 1) throw InvalidParameter("substitution power must be >= 1");
    RatPoly::Terms t;
    for (const auto& [k, c] : q.terms()) t.emplace(k * d, c);
    return RatPoly(std::move(t));
}

/// True when every exponent of q is a multiple of d.
inline bool is_polynomial_in_power(const RatPoly& q, Degree d) {
    return std::all_of(q.terms().begin(), q.terms().end(), [d](const auto& kv) { return kv.first % d == 0; });
}

/// Inverse of poly_substitute_power: q(x^d) -> q(x). Requires is_polynomial_in_power(q, d).
inline RatPoly poly_contract_power(const RatPoly& q, Degree d) {
    if (!is_polynomial_in_power(q, d)) throw InvalidParameter("polynomial is not a polynomial in x^d");
    RatPoly::Terms t;
    for (const auto& [k, c] : q.terms()) t.emplace(k / d, c);
    return RatPoly(std::move(t));
}

inline RatPoly poly_derivative(const RatPoly& q) {
    RatPoly::Terms t;
    for (const auto& [k, c] : q.terms())
        if (k > 0) t.emplace(k - 1, c * k);
    return RatPoly(std::move(t));
}

inline IntPolyWithContent poly_normalize_integer(const RatPoly& q) {
    if (q.is_zero()) throw ZeroPolynomial();
    Integer den_lcm(1);
    for (const auto& [k, c] : q.terms()) den_lcm = lcm(den_lcm, c.get_den());
    Integer content(0);
    for (const auto& [k, c] : q.terms()) content = gcd(content, c.get_num() * (den_lcm / c.get_den()));
    if (q.leading_coefficient() < 0) content = -content;

    std::vector<Integer> coeffs(static_cast<std::size_t>(q.degree()) + 1, Integer(0));
    for (const auto& [k, c] : q.terms())
        coeffs[static_cast<std::size_t>(k)] = c.get_num() * (den_lcm / c.get_den()) / content;
    return {IntPoly(std::move(coeffs)), make_rational(content, den_lcm)};
}

/// q(r) mod m by Horner with reduction at each step; result in [0, m).
inline Integer poly_eval_mod(const IntPoly& q, const Integer& r, const Integer& m) {
    if (m < 1) throw InvalidParameter("modulus must be positive");
    Integer rr = mod(r, m);
    Integer acc(0);
    for (auto it = q.coeffs.rbegin(); it != q.coeffs.rend(); ++it) {
        acc = acc * rr + *it;
        acc = mod(acc, m);
    }
    return acc;
}

/// Monic gcd (zero when both inputs are zero).
inline RatPoly poly_gcd(RatPoly a, RatPoly b) {
    while (!b.is_zero()) {
        RatPoly r = poly_divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return a.is_zero() ? a : a.monic();
}

/// 1 + x + ... + x^{d-1}.
inline RatPoly geometric_sum(Degree d) {
    RatPoly::Terms t;
    for (Degree k = 0; k < d; ++k) t.emplace(k, Rational(1));
    return RatPoly(std::move(t));
}

inline RatPoly x_minus_one() { return RatPoly::from_ascending({-1, 1}); }

/// True when (x - 1) divides q, i.e. q(1) = 0.
inline bool divisible_by_x_minus_one(const RatPoly& q) { return q.evaluate(Rational(1)) == 0; }

// ---------------------------------------------------------------------------
// Text form: ascending coefficient list, e.g. "1, 0, 1" for x^2 + 1.
// ---------------------------------------------------------------------------

inline RatPoly parse_poly(std::string_view text) {
    std::vector<Rational> coeffs;
    std::string s(text);
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) coeffs.push_back(parse_rational(item));
    return RatPoly::from_ascending(coeffs);
}

inline std::string format_poly(const RatPoly& q) {
    if (q.is_zero()) return "0";
    std::string out;
    auto dense = q.dense();
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (i) out += ", ";
        out += to_string(dense[i]);
    }
    return out;
}

inline IntPoly parse_int_poly(std::string_view text) {
    std::vector<Integer> coeffs;
    std::string s(text);
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) coeffs.push_back(parse_integer(item));
    return IntPoly(std::move(coeffs));
}

}  // namespace mahlercf
