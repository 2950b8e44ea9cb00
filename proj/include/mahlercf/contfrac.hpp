#pragma once

// Continued fractions of Laurent series: the Euclidean expansion, convergents,
// and the monic renormalization with its beta parameters.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "laurent.hpp"
#include "poly.hpp"

namespace mahlercf {

struct Convergent {
    std::size_t index = 0;
    RatPoly p;
    RatPoly q;
    /// deg a_{index+1}; nullopt when the expansion terminated here (p/q is the value).
    std::optional<Degree> rate;
};

struct CFExpansion {
    std::vector<RatPoly> partial_quotients;  // a_0 .. a_n
    std::vector<Convergent> convergents;     // 0 .. n, raw recurrence normalization
    bool terminated = false;                 // input was rational and fully expanded
    Degree floor_used = LaurentSeries::kExactFloor;

    std::size_t size() const noexcept { return convergents.size(); }
};

namespace detail {

inline void push_convergent(CFExpansion& cf, const RatPoly& a) {
    const std::size_t n = cf.convergents.size();
    Convergent c;
    c.index = n;
    if (n == 0) {
        c.p = a;
        c.q = RatPoly::constant(Rational(1));
    } else {
        const Convergent& prev = cf.convergents[n - 1];
        const RatPoly pp = n >= 2 ? cf.convergents[n - 2].p : RatPoly::constant(Rational(1));
        const RatPoly qq = n >= 2 ? cf.convergents[n - 2].q : RatPoly();
        c.p = a * prev.p + pp;
        c.q = a * prev.q + qq;
        cf.convergents[n - 1].rate = a.degree();
    }
    cf.partial_quotients.push_back(a);
    cf.convergents.push_back(std::move(c));
}

}  // namespace detail

/// Expands u into [a_0; a_1, ..., a_n].
///
/// Runs on the error series e_k = q_k u - p_k, which obey
/// e_{k+1} = e_{k-1} + a_{k+1} e_k with a_{k+1} the polynomial part of
/// -e_{k-1}/e_k. This is the classic "invert the remainder" algorithm with the
/// reciprocals never formed explicitly. e_k is exactly known down to
/// floor(u) + deg q_k; every partial quotient is accepted only when all the
/// coefficients it depends on lie above the relevant floors.
inline CFExpansion cf_expand(const LaurentSeries& u, std::size_t n) {
    CFExpansion cf;
    cf.floor_used = u.floor();

    detail::push_convergent(cf, u.polynomial_part());
    LaurentSeries e_prev = LaurentSeries::exact(RatPoly::constant(Rational(-1)));
    LaurentSeries e_cur = u - LaurentSeries::exact(cf.partial_quotients[0]);

    auto leading_degree = [&](const LaurentSeries& e, std::size_t k) -> std::optional<Degree> {
        if (e.is_exactly_zero()) return std::nullopt;
        if (e.is_zero_so_far())
            throw InsufficientPrecision("remainder " + std::to_string(k) + " is zero above floor " +
                                        std::to_string(e.floor()));
        return e.degree();
    };

    for (std::size_t k = 0;; ++k) {
        const std::optional<Degree> dc = leading_degree(e_cur, k);
        if (!dc) {
            cf.terminated = true;
            cf.convergents.back().rate = std::nullopt;
            break;
        }
        if (k == n) {
            cf.convergents.back().rate = -*dc - cf.convergents.back().q.degree();
            break;
        }
        const Degree D = *dc;
        const Degree top = *e_prev.degree();
        const Degree m = top - D;
        if (m < 1) throw Error("internal: remainder degrees not decreasing");
        if (D < e_prev.floor() || D - m < e_cur.floor())
            throw InsufficientPrecision("partial quotient " + std::to_string(k + 1) + " needs degrees below floor");

        // Quotient of e_prev by e_cur restricted to degrees D .. top.
        std::vector<Rational> rem(static_cast<std::size_t>(m) + 1);
        for (Degree j = 0; j <= m; ++j) rem[static_cast<std::size_t>(j)] = e_prev.coefficient(D + j);
        const Rational lc = e_cur.leading_coefficient();
        RatPoly::Terms a_terms;
        for (Degree j = m; j >= 0; --j) {
            const Rational c = rem[static_cast<std::size_t>(j)] / lc;
            if (c == 0) continue;
            a_terms.emplace(j, -c);
            for (Degree i = 1; i <= j; ++i) rem[static_cast<std::size_t>(j - i)] -= c * e_cur.coefficient(D - i);
        }
        RatPoly a(std::move(a_terms));

        detail::push_convergent(cf, a);
        LaurentSeries e_next = e_prev + a * e_cur;
        e_prev = std::move(e_cur);
        e_cur = std::move(e_next);
    }
    return cf;
}

/// Finite continued fraction of the rational function p/q (polynomial Euclid).
/// Stops after a_n or at termination, whichever comes first.
inline CFExpansion cf_expand_rational(const RatPoly& p, const RatPoly& q,
                                      std::size_t n = static_cast<std::size_t>(-1)) {
    if (q.is_zero()) throw DivisionByZeroPoly();
    CFExpansion cf;
    RatPoly num = p, den = q;
    for (std::size_t k = 0;; ++k) {
        auto [a, r] = poly_divmod(num, den);
        detail::push_convergent(cf, a);
        if (r.is_zero()) {
            cf.terminated = true;
            cf.convergents.back().rate = std::nullopt;
            break;
        }
        if (k == n) {
            // deg of the next quotient = deg den - deg r
            cf.convergents.back().rate = den.degree() - r.degree();
            break;
        }
        num = std::move(den);
        den = std::move(r);
    }
    return cf;
}

/// Monic view of an expansion: q_hat_n = q_n / rho_n with rho_n = lc(q_n), and
/// q_hat_{n+1} = a_hat_{n+1} q_hat_n + beta_{n+1} q_hat_{n-1}.
struct MonicCF {
    std::vector<RatPoly> monic_quotients;     // a_hat_n, index 0 unused (a_hat_0 = a_0 / rho_0 = a_0)
    std::vector<Rational> betas;              // beta_n; betas[0] = 0, betas[1] = 0 (q_{-1} = 0)
    std::vector<RatPoly> monic_numerators;    // p_hat_n
    std::vector<RatPoly> monic_denominators;  // q_hat_n
    std::vector<Rational> leading_coeffs;     // rho_n
};

inline MonicCF monic_normalize(const CFExpansion& cf) {
    if (cf.size() < 2) throw InvalidParameter("monic_normalize needs at least two convergents");
    MonicCF m;
    const std::size_t n = cf.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Rational rho = cf.convergents[i].q.leading_coefficient();
        m.leading_coeffs.push_back(rho);
        m.monic_denominators.push_back(cf.convergents[i].q * (Rational(1) / rho));
        m.monic_numerators.push_back(cf.convergents[i].p * (Rational(1) / rho));
    }
    m.monic_quotients.push_back(cf.partial_quotients[0]);
    m.betas.assign(2, Rational(0));
    for (std::size_t i = 1; i < n; ++i) {
        m.monic_quotients.push_back(cf.partial_quotients[i] * (m.leading_coeffs[i - 1] / m.leading_coeffs[i]));
        if (i >= 2) m.betas.push_back(m.leading_coeffs[i - 2] / m.leading_coeffs[i]);
    }
    return m;
}

/// Rebuilds q_hat_n from the monic quotients and betas alone.
inline std::vector<RatPoly> monic_reconstruct(const MonicCF& m) {
    std::vector<RatPoly> q;
    q.push_back(RatPoly::constant(Rational(1)));
    if (m.monic_quotients.size() > 1) q.push_back(m.monic_quotients[1]);
    for (std::size_t i = 2; i < m.monic_quotients.size(); ++i)
        q.push_back(m.monic_quotients[i] * q[i - 1] + m.betas[i] * q[i - 2]);
    return q;
}

/// Measured rates of every convergent against u; each must equal deg a_{n+1} >= 1.
inline std::vector<Degree> convergent_soundness(const LaurentSeries& u, const CFExpansion& cf) {
    std::vector<Degree> rates;
    for (const Convergent& c : cf.convergents) {
        if (!c.rate) break;
        auto measured = rate_of_approximation(u, c.p, c.q);
        if (!measured || *measured != *c.rate || *measured < 1)
            throw RateViolation("convergent " + std::to_string(c.index) + " has measured rate " +
                                (measured ? std::to_string(*measured) : std::string("inf")) + ", expected " +
                                std::to_string(*c.rate));
        rates.push_back(*measured);
    }
    return rates;
}

// ---------------------------------------------------------------------------
// Refloor-and-retry drivers
// ---------------------------------------------------------------------------

struct PrecisionPolicy {
    Degree initial_floor = 0;       // 0 = use default_floor()
    Degree floor_cap = -(1 << 20);  // most negative floor ever tried
};

/// -(2 n d + 16): denominators grow by about d per two steps.
inline Degree default_floor(int d, std::size_t n) { return -(2 * static_cast<Degree>(n) * d + 16); }

/// Calls fn(floor) and doubles |floor| on InsufficientPrecision, up to the cap.
template <class Fn>
auto with_refloor(Degree initial_floor, Degree floor_cap, Fn&& fn) -> decltype(fn(Degree{})) {
    Degree floor = initial_floor;
    for (;;) {
        try {
            return fn(floor);
        } catch (const InsufficientPrecision&) {
            if (floor <= floor_cap) throw;
            floor = std::max(2 * floor, floor_cap);
        }
    }
}

/// CF of a family member to depth n, regenerating the series as needed.
inline CFExpansion expand_family(int d, SeriesKind kind, std::size_t n, const PrecisionPolicy& policy = {}) {
    const Degree start = policy.initial_floor != 0 ? policy.initial_floor : default_floor(d, n);
    return with_refloor(start, policy.floor_cap, [&](Degree floor) {
        return cf_expand(generate_series({d, kind, floor}), n);
    });
}

}  // namespace mahlercf
