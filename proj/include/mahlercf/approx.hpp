#pragma once

// Real values of f_d and g_d at integers, with certified error bounds, and the
// rational approximations built from convergents by x -> x^{d^n}.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contfrac.hpp"
#include "errors.hpp"
#include "padic.hpp"
#include "poly.hpp"
#include "rational.hpp"

namespace mahlercf {

struct CertifiedValue {
    Rational value;
    Rational error_bound;  // |true - value| <= error_bound
    std::string target;
};

namespace detail {

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline unsigned long checked_ulong(const Integer& z, const char* what) {
    if (!z.fits_ulong_p()) throw InvalidParameter(std::string(what) + " exponent too large");
    return z.get_ui();
}

}  // namespace detail

/// r_K(a) = prod_{t<=K} (1 - a^{-d^t}) with the smallest K such that 2/a^{d^{K+1}} <= eps.
/// For G the value and bound are scaled by a^{-(d-1)}.
inline CertifiedValue eval_mahler(const Integer& a, int d, const Rational& eps, SeriesKind which) {
    if (a < 2) throw InvalidParameter("a must be >= 2");
    if (d < 2) throw InvalidParameter("d must be >= 2");
    if (eps <= 0) throw InvalidParameter("eps must be positive");
    if (which != SeriesKind::F && which != SeriesKind::G) throw InvalidParameter("eval supports F and G");

    Rational value(1);
    Integer power(1);  // d^t
    for (;;) {
        const Integer a_pow = ipow(a, detail::checked_ulong(power, "evaluation"));  // a^{d^t}
        value *= make_rational(a_pow - 1, a_pow);
        power *= d;
        const Rational bound = make_rational(Integer(2), ipow(a, detail::checked_ulong(power, "evaluation")));
        if (bound <= eps) {
            CertifiedValue v{value, bound, std::string(to_string(which)) + "_" + std::to_string(d) + "(" + to_string(a) + ")"};
            if (which == SeriesKind::G) {
                const Rational scale = make_rational(Integer(1), ipow(a, static_cast<unsigned long>(d - 1)));
                v.value *= scale;
                v.error_bound *= scale;
            }
            return v;
        }
    }
}

/// Integer continued fraction digits on which both ends of [value - bound, value + bound] agree.
inline std::vector<Integer> real_cf_prefix(const CertifiedValue& v, std::size_t max_terms) {
    std::vector<Integer> out;
    Rational lo = v.value - v.error_bound, hi = v.value + v.error_bound;
    const auto floor_of = [](const Rational& r) {
        Integer f;
        mpz_fdiv_q(f.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
        return f;
    };
    while (out.size() < max_terms) {
        const Integer a = floor_of(lo);
        if (floor_of(hi) != a) break;
        out.push_back(a);
        Rational flo = lo - a, fhi = hi - a;
        if (flo == 0 && fhi == 0) break;  // exact rational, finished
        if (flo == 0 || fhi == 0) break;  // one end terminates, the other does not
        lo = 1 / fhi;
        hi = 1 / flo;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Large-d irrationality exponent
// ---------------------------------------------------------------------------

struct ExponentEntry {
    int k = 0;
    Integer denominator;      // q_k = a^E, E = (d^{k+1}-1)/(d-1)
    Integer denominator_log;  // E
    Integer error_log;        // d^{k+1}: error <= 2 a^{-d^{k+1}}
    bool inequality_holds = false;  // 2 a^{-d^{k+1}} <= q_k^{-(d-1)}, by cross-multiplication
    Rational exponent_lower;  // (d^{k+1} - 1/floor(log2 a)) / E
    Rational exponent_upper;  // d^{k+1} / E
};

struct ExponentReport {
    Integer a;
    int d = 0;
    std::vector<ExponentEntry> entries;
};

/// |f_d(a) - r_k(a)| <= 2/a^{d^{k+1}} <= q_k^{-(d-1)} for q_k = a^{(d^{k+1}-1)/(d-1)}.
/// The effective exponent log(1/error)/log q_k is bracketed by rationals using
/// log 2 / log a <= 1 / floor(log2 a).
inline ExponentReport irrationality_witness(const Integer& a, int d, int k_max) {
    if (a < 2) throw InvalidParameter("a must be >= 2");
    if (d < 4) throw InvalidParameter("irrationality witness needs d >= 4");
    ExponentReport rep{a, d, {}};
    const Integer bits_floor(static_cast<unsigned long>(mpz_sizeinbase(a.get_mpz_t(), 2) - 1));
    for (int k = 0; k <= k_max; ++k) {
        ExponentEntry e;
        e.k = k;
        const Integer top = ipow(Integer(d), static_cast<unsigned long>(k + 1));
        const Integer E = (top - 1) / (d - 1);
        e.denominator_log = E;
        e.error_log = top;
        e.denominator = ipow(a, detail::checked_ulong(E, "denominator"));
        // 2 / a^top <= 1 / a^{E(d-1)}  <=>  2 a^{E(d-1)} <= a^top
        e.inequality_holds = 2 * ipow(a, detail::checked_ulong(E * (d - 1), "bound")) <= ipow(a, detail::checked_ulong(top, "bound"));
        e.exponent_lower = make_rational(top, E) - make_rational(Integer(1), bits_floor * E);
        e.exponent_upper = make_rational(top, E);
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Approximants from convergents under x -> x^{d^n}
// ---------------------------------------------------------------------------

/// Polynomial form: p~ = prod_{k<n} m_k(x) p_t(x^{d^n}), q~ = q_t(x^{d^n}) with
/// m_k = x^{d^k} - 1 for d = 2 and x^{3^{k+1}} (x^{3^k} - 1) for d = 3.
inline std::pair<RatPoly, RatPoly> tilde_polynomials(int d, const RatPoly& p, const RatPoly& q, int n) {
    if (d != 2 && d != 3) throw InvalidParameter("approximants are defined for d = 2 and d = 3");
    RatPoly factor = RatPoly::constant(Rational(1));
    Degree dk = 1;
    for (int k = 0; k < n; ++k, dk *= d) {
        RatPoly m = RatPoly::monomial(Rational(1), dk) - RatPoly::constant(Rational(1));
        if (d == 3) m = RatPoly::monomial(Rational(1), dk * 3) * m;
        factor = factor * m;
    }
    return {factor * poly_substitute_power(p, dk), poly_substitute_power(q, dk)};
}

struct TildeApproximant {
    Integer a;
    int d = 0;
    std::size_t t = 0;
    int n = 0;
    Integer p_tilde, q_tilde;       // with the common denominator of p_t, q_t cleared
    Rational quality_lo, quality_hi;  // |g_d(a) - p~/q~| q~^2
};

namespace detail {

inline Integer eval_int(const IntPoly& q, const Integer& x) {
    Integer acc(0);
    for (auto it = q.coeffs.rbegin(); it != q.coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

// p, q scaled by the lcm of all coefficient denominators.
inline std::pair<IntPoly, IntPoly> clear_denominators(const RatPoly& p, const RatPoly& q) {
    Integer L(1);
    for (const auto& [k, c] : p.terms()) L = lcm(L, c.get_den());
    for (const auto& [k, c] : q.terms()) L = lcm(L, c.get_den());
    auto to_int = [&](const RatPoly& r) {
        std::vector<Integer> co(r.is_zero() ? 0 : static_cast<std::size_t>(r.degree()) + 1, Integer(0));
        for (const auto& [k, c] : r.terms()) co[static_cast<std::size_t>(k)] = c.get_num() * (L / c.get_den());
        return IntPoly(std::move(co));
    };
    return {to_int(p), to_int(q)};
}

}  // namespace detail

inline std::vector<TildeApproximant> tilde_approximants(const Integer& a, int d, std::size_t t, int n_max,
                                                        const CFExpansion& cf, unsigned max_refinements = 8) {
    if (a < 2) throw InvalidParameter("a must be >= 2");
    if (d != 2 && d != 3) throw InvalidParameter("approximants are defined for d = 2 and d = 3");
    if (d == 3 && t % 2 == 1) throw InvalidParameter("d = 3 approximants need even t");
    if (t >= cf.size()) throw InvalidParameter("t beyond the expansion");
    const auto [P, Q] = detail::clear_denominators(cf.convergents[t].p, cf.convergents[t].q);

    std::vector<TildeApproximant> out;
    Integer prefix(1);
    Integer dk(1);  // d^n
    for (int n = 0; n <= n_max; ++n) {
        TildeApproximant ta;
        ta.a = a;
        ta.d = d;
        ta.t = t;
        ta.n = n;
        const Integer X = ipow(a, detail::checked_ulong(dk, "approximant"));
        ta.p_tilde = prefix * detail::eval_int(P, X);
        ta.q_tilde = detail::eval_int(Q, X);
        if (ta.q_tilde == 0) throw ZeroDenominator("q~ vanishes at a");
        const Rational approx = make_rational(ta.p_tilde, ta.q_tilde);
        const Rational q2 = Rational(ta.q_tilde * ta.q_tilde);

        // eps well below the expected distance C/q~^2
        Rational eps = make_rational(Integer(1), ta.q_tilde * ta.q_tilde * (Integer(1) << 64));
        bool separated = false;
        for (unsigned i = 0; i <= max_refinements; ++i) {
            const CertifiedValue g = eval_mahler(a, d, eps, SeriesKind::G);
            const Rational dist = detail::abs(g.value - approx);
            if (dist > g.error_bound) {
                ta.quality_lo = (dist - g.error_bound) * q2;
                ta.quality_hi = (dist + g.error_bound) * q2;
                separated = true;
                break;
            }
            eps /= Rational(Integer(1) << 64);
        }
        if (!separated) throw PrecisionCascade("could not separate g_d(a) from approximant n=" + std::to_string(n));
        out.push_back(std::move(ta));

        // prefix picks up m_n(a) for the next n
        const Integer an = ipow(a, detail::checked_ulong(dk, "approximant"));
        prefix *= d == 2 ? Integer(an - 1) : Integer(ipow(a, detail::checked_ulong(dk * 3, "approximant")) * (an - 1));
        dk *= d;
    }
    return out;
}

/// Largest certified upper quality over a run: the empirical constant.
inline Rational empirical_constant(const std::vector<TildeApproximant>& run) {
    Rational c(0);
    for (const auto& t : run) c = std::max(c, t.quality_hi);
    return c;
}

/// Exponent v with p^v || N (N != 0).
inline unsigned long p_adic_valuation(Integer N, const Integer& p) {
    if (N == 0) throw InvalidParameter("valuation of zero");
    unsigned long v = 0;
    while (N % p == 0) N /= p, ++v;
    return v;
}

}  // namespace mahlercf
