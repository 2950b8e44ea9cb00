#pragma once

// Truncated Laurent series in x^{-1} with an exactness floor, and the
// generalized Thue-Morse family f_d, g_d, h_d, u_d.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "poly.hpp"
#include "rational.hpp"

namespace mahlercf {

/// Coefficients at degrees >= floor() are the true ones; nothing is known below.
/// A series whose floor is kExactFloor is known completely (finite support).
class LaurentSeries {
public:
    using Terms = std::map<Degree, Rational>;
    static constexpr Degree kExactFloor = kMinusInfinity;

    LaurentSeries() = default;  // exact zero

    LaurentSeries(Terms terms, Degree floor) : terms_(std::move(terms)), floor_(floor) {
        for (auto it = terms_.begin(); it != terms_.end();)
            it = (it->second == 0 || it->first < floor_) ? terms_.erase(it) : std::next(it);
    }

    static LaurentSeries exact(const RatPoly& p) {
        Terms t(p.terms().begin(), p.terms().end());
        return LaurentSeries(std::move(t), kExactFloor);
    }

    static LaurentSeries monomial(const Rational& c, Degree k) { return LaurentSeries(Terms{{k, c}}, kExactFloor); }

    Degree floor() const noexcept { return floor_; }
    bool is_exact() const noexcept { return floor_ == kExactFloor; }
    const Terms& terms() const noexcept { return terms_; }

    /// Leading degree, or nullopt when nothing nonzero is known ("zero so far").
    std::optional<Degree> degree() const {
        if (terms_.empty()) return std::nullopt;
        return terms_.rbegin()->first;
    }

    bool is_zero_so_far() const noexcept { return terms_.empty(); }
    bool is_exactly_zero() const noexcept { return terms_.empty() && is_exact(); }

    Rational coefficient(Degree k) const {
        if (k < floor_) throw InsufficientPrecision("coefficient at degree " + std::to_string(k) +
                                                    " lies below floor " + std::to_string(floor_));
        auto it = terms_.find(k);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    Rational leading_coefficient() const {
        if (terms_.empty()) throw ZeroSoFarDivision();
        return terms_.rbegin()->second;
    }

    /// Degrees >= 0 as a polynomial. Needs floor <= 0.
    RatPoly polynomial_part() const {
        if (floor_ > 0) throw InsufficientPrecision("polynomial part needs floor <= 0");
        RatPoly::Terms t(terms_.lower_bound(0), terms_.end());
        return RatPoly(std::move(t));
    }

    /// Forget everything below `new_floor`.
    LaurentSeries truncated(Degree new_floor) const {
        return LaurentSeries(terms_, std::max(floor_, new_floor));
    }

    LaurentSeries shifted(Degree s) const {
        Terms t;
        for (const auto& [k, c] : terms_) t.emplace(k + s, c);
        return LaurentSeries(std::move(t), is_exact() ? kExactFloor : floor_ + s);
    }

    /// s(x) -> s(x^d). The unknown tail O(x^{F-1}) becomes O(x^{d(F-1)}).
    LaurentSeries substitute_power(Degree d) const {
        if (d < 1) throw InvalidParameter("substitution power must be >= 1");
        Terms t;
        for (const auto& [k, c] : terms_) t.emplace(k * d, c);
        return LaurentSeries(std::move(t), is_exact() ? kExactFloor : d * (floor_ - 1) + 1);
    }

    LaurentSeries& operator*=(const Rational& s) {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [k, c] : terms_) c *= s;
        return *this;
    }

    friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) { return combine(a, b, 1); }
    friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) { return combine(a, b, -1); }
    friend LaurentSeries operator*(LaurentSeries a, const Rational& s) { return a *= s; }

    friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
        const Degree floor = product_floor(a, b);
        Terms t;
        for (const auto& [i, ci] : a.terms_) {
            for (auto it = b.terms_.rbegin(); it != b.terms_.rend(); ++it) {
                if (i + it->first < floor) break;
                auto [pos, inserted] = t.try_emplace(i + it->first, ci * it->second);
                if (!inserted) pos->second += ci * it->second;
            }
        }
        return LaurentSeries(std::move(t), floor);
    }

    friend LaurentSeries operator*(const LaurentSeries& a, const RatPoly& p) { return a * exact(p); }
    friend LaurentSeries operator*(const RatPoly& p, const LaurentSeries& a) { return a * exact(p); }

    /// Coefficientwise equality at every degree >= max(floors) and >= from.
    friend bool agree_above(const LaurentSeries& a, const LaurentSeries& b, Degree from, Degree* mismatch = nullptr) {
        const Degree lo = std::max({a.floor_, b.floor_, from});
        LaurentSeries diff = (a - b).truncated(lo);
        if (diff.terms_.empty()) return true;
        if (mismatch) *mismatch = diff.terms_.rbegin()->first;
        return false;
    }

private:
    static LaurentSeries combine(const LaurentSeries& a, const LaurentSeries& b, int sign) {
        Terms t = a.terms_;
        for (const auto& [k, c] : b.terms_) {
            auto [it, inserted] = t.try_emplace(k, sign > 0 ? c : Rational(-c));
            if (!inserted) {
                if (sign > 0) it->second += c;
                else it->second -= c;
            }
        }
        return LaurentSeries(std::move(t), std::max(a.floor_, b.floor_));
    }

    // Upper bound on the degree of the unknown tail, kExactFloor if none.
    static Degree tail_degree(const LaurentSeries& s) { return s.is_exact() ? kExactFloor : s.floor_ - 1; }

    static Degree degree_bound(const LaurentSeries& s) {
        if (!s.terms_.empty()) return s.terms_.rbegin()->first;
        return tail_degree(s);
    }

    static Degree product_floor(const LaurentSeries& a, const LaurentSeries& b) {
        if (a.is_exactly_zero() || b.is_exactly_zero()) return kExactFloor;
        Degree f = kExactFloor;
        if (!a.is_exact()) f = std::max(f, tail_degree(a) + degree_bound(b) + 1);
        if (!b.is_exact()) f = std::max(f, tail_degree(b) + degree_bound(a) + 1);
        return f;
    }

    Terms terms_;
    Degree floor_ = kExactFloor;
};

/// num / den computed by solving for coefficients from the top down.
/// The result floor is derived from both inputs' floors; `min_floor` caps the
/// expansion when the quotient would otherwise be infinite (both exact).
inline LaurentSeries series_divide(const LaurentSeries& num, const LaurentSeries& den,
                                   Degree min_floor = LaurentSeries::kExactFloor) {
    if (den.is_zero_so_far()) throw ZeroSoFarDivision();
    const Degree ev = *den.degree();
    const Rational lc = den.leading_coefficient();

    Degree floor = LaurentSeries::kExactFloor;
    const Degree es = num.degree() ? *num.degree() : (num.is_exact() ? LaurentSeries::kExactFloor : num.floor() - 1);
    if (!num.is_exact()) floor = std::max(floor, num.floor() - ev);
    if (!den.is_exact() && es != LaurentSeries::kExactFloor) floor = std::max(floor, es + den.floor() - 2 * ev);
    floor = std::max(floor, min_floor);
    if (num.is_exactly_zero()) return LaurentSeries({}, floor);
    if (floor == LaurentSeries::kExactFloor)
        throw InvalidParameter("series_divide of two exact series needs an explicit min_floor");
    if (num.is_zero_so_far()) return LaurentSeries({}, floor);

    const Degree top = es - ev;
    std::vector<Rational> out;  // out[i] is the coefficient at degree top - i
    LaurentSeries::Terms result;
    for (Degree k = top; k >= floor; --k) {
        Rational acc = num.terms().count(k + ev) ? num.terms().at(k + ev) : Rational(0);
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (out[i] == 0) continue;
            const Degree j = top - static_cast<Degree>(i);  // degree of the known quotient term
            auto it = den.terms().find(k + ev - j);
            if (it != den.terms().end()) acc -= out[i] * it->second;
        }
        Rational c = acc / lc;
        out.push_back(c);
        if (c != 0) result.emplace(k, c);
    }
    return LaurentSeries(std::move(result), floor);
}

/// p/q expanded down to (and including) `floor`.
inline LaurentSeries series_from_rational(const RatPoly& p, const RatPoly& q, Degree floor) {
    if (q.is_zero()) throw DivisionByZeroPoly();
    return series_divide(LaurentSeries::exact(p), LaurentSeries::exact(q), floor);
}

// ---------------------------------------------------------------------------
// The generalized Thue-Morse family
// ---------------------------------------------------------------------------

enum class SeriesKind { F, G, H, U };

inline const char* to_string(SeriesKind k) {
    switch (k) {
        case SeriesKind::F: return "f";
        case SeriesKind::G: return "g";
        case SeriesKind::H: return "h";
        case SeriesKind::U: return "u";
    }
    return "?";
}

struct SeriesFamily {
    int d = 2;
    SeriesKind kind = SeriesKind::F;
    Degree floor = -32;
};

/// f_d = prod_{t>=0} (1 - x^{-d^t}) truncated at `floor`. Its coefficients are
/// all in {-1, 0, 1}, so the product is accumulated densely over machine ints.
inline LaurentSeries thue_morse_product(int d, Degree floor, std::optional<int> last_factor = std::nullopt) {
    if (d < 2) throw InvalidParameter("d must be >= 2");
    if (floor > 0) throw InvalidParameter("floor must be <= 0");
    const auto depth = static_cast<std::size_t>(-floor);
    std::vector<int> c(depth + 1, 0);  // c[i] is the coefficient of x^{-i}
    c[0] = 1;
    Degree power = 1;
    for (int t = 0; power <= -floor; ++t) {
        if (last_factor && t > *last_factor) break;
        const auto s = static_cast<std::size_t>(power);
        for (std::size_t i = depth; i >= s; --i) {
            c[i] -= c[i - s];
            if (i == s) break;
        }
        power *= d;
    }
    LaurentSeries::Terms terms;
    for (std::size_t i = 0; i <= depth; ++i)
        if (c[i] != 0) terms.emplace(-static_cast<Degree>(i), Rational(c[i]));
    return LaurentSeries(std::move(terms), floor);
}

inline LaurentSeries generate_series(const SeriesFamily& fam) {
    if (fam.d < 2) throw InvalidParameter("d must be >= 2");
    if (fam.floor > 0) throw InvalidParameter("floor must be <= 0");
    LaurentSeries f = thue_morse_product(fam.d, fam.floor);
    switch (fam.kind) {
        case SeriesKind::F: return f;
        case SeriesKind::G: return f.shifted(-(fam.d - 1)).truncated(fam.floor);
        case SeriesKind::H: return f.shifted(-1).truncated(fam.floor);
        case SeriesKind::U: {
            auto one_minus = LaurentSeries::exact(RatPoly::constant(Rational(1))) - LaurentSeries::monomial(Rational(1), -1);
            return (one_minus * f).truncated(fam.floor);
        }
    }
    return f;
}

/// r_k = prod_{t=0}^{k} (1 - x^{-d^t}) as numerator / x^E with E = (d^{k+1}-1)/(d-1).
struct FiniteProduct {
    RatPoly numerator;   // prod (x^{d^t} - 1)
    RatPoly denominator; // x^E
};

inline FiniteProduct finite_product(int d, int k) {
    if (d < 2 || k < 0) throw InvalidParameter("finite_product needs d >= 2, k >= 0");
    RatPoly num = RatPoly::constant(Rational(1));
    Degree power = 1, e = 0;
    for (int t = 0; t <= k; ++t) {
        num = num * (RatPoly::monomial(Rational(1), power) - RatPoly::constant(Rational(1)));
        e += power;
        power *= d;
    }
    return {num, RatPoly::monomial(Rational(1), e)};
}

/// Integer c with ||u - p/q|| = -2||q|| - c, measured through q*u - p
/// (exactly known down to floor(u) + deg q). nullopt when u equals p/q exactly.
inline std::optional<Degree> rate_of_approximation(const LaurentSeries& u, const RatPoly& p, const RatPoly& q) {
    if (q.is_zero()) throw DivisionByZeroPoly();
    LaurentSeries w = q * u - LaurentSeries::exact(p);
    if (w.is_exactly_zero()) return std::nullopt;
    if (w.is_zero_so_far())
        throw InsufficientPrecision("u - p/q is zero above floor " + std::to_string(w.floor()));
    return -*w.degree() - q.degree();
}

struct FunctionalEquationReport {
    int d = 0;
    Degree requested_floor = 0;
    Degree verified_floor = 0;  // both identities hold at every degree >= this
};

/// Checks f_d(x^d) = x f_d(x)/(x-1) and g_d(x^d) = g_d(x)/(x^{d^2-2d}(x-1)) coefficientwise.
inline FunctionalEquationReport verify_functional_equations(int d, Degree floor) {
    if (d < 2) throw InvalidParameter("d must be >= 2");
    if (floor > -d) throw InvalidParameter("floor must be <= -d");

    const LaurentSeries x_minus_1 = LaurentSeries::exact(x_minus_one());
    Degree verified = kMinusInfinity;

    auto check = [&](const LaurentSeries& lhs, const LaurentSeries& rhs, const char* what) {
        Degree bad = 0;
        if (!agree_above(lhs, rhs, floor, &bad)) throw MismatchAt(bad, what);
        verified = std::max({verified, lhs.floor(), rhs.floor(), floor});
    };

    const LaurentSeries f = generate_series({d, SeriesKind::F, floor});
    check(f.substitute_power(d), series_divide(f.shifted(1), x_minus_1), "f_d(x^d) = x f_d(x)/(x-1)");

    const LaurentSeries g = generate_series({d, SeriesKind::G, floor});
    const Degree shift = static_cast<Degree>(d) * d - 2 * d;
    check(g.substitute_power(d), series_divide(g.shifted(-shift), x_minus_1),
          "g_d(x^d) = g_d(x)/(x^{d^2-2d}(x-1))");

    return {d, floor, verified};
}

}  // namespace mahlercf
