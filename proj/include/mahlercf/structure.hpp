#pragma once

// Structure of the convergents of g_d: transports from h_d and u_d, their
// classification, the two-term monic recurrence with its beta parameters, and
// the identities those betas satisfy.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contfrac.hpp"
#include "errors.hpp"
#include "laurent.hpp"
#include "poly.hpp"

namespace mahlercf {

enum class Origin { H, U };

inline const char* to_string(Origin o) { return o == Origin::H ? "H" : "U"; }

namespace detail {

inline std::pair<RatPoly, RatPoly> reduce_fraction(const RatPoly& p, const RatPoly& q) {
    const RatPoly g = poly_gcd(p, q);
    if (g.degree() <= 0) return {p, q};
    return {poly_divmod(p, g).first, poly_divmod(q, g).first};
}

inline Degree measured_rate(const LaurentSeries& u, const RatPoly& p, const RatPoly& q) {
    auto [pr, qr] = reduce_fraction(p, q);
    auto c = rate_of_approximation(u, pr, qr);
    if (!c) throw RateViolation("fraction equals the irrational series exactly");
    return *c;
}

// p == s * q for some scalar s (both may be zero).
inline bool proportional(const RatPoly& p, const RatPoly& q) {
    if (p.is_zero() || q.is_zero()) return p.is_zero() && q.is_zero();
    return p * q.leading_coefficient() == q * p.leading_coefficient();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Transports h_d, u_d -> g_d and the (x-1) exchange between u_d and h_d
// ---------------------------------------------------------------------------

struct TransportedConvergent {
    Convergent source;
    Origin origin = Origin::H;
    RatPoly result_p;
    RatPoly result_q;
    Degree claimed_rate_lower_bound = 0;
    bool exact_rate_condition = false;  // (x-1) does not divide q (H) or p (U)
    Degree measured_rate = 0;           // of the reduced fraction against g_d
};

/// H: (x-1) p(x^d) / q(x^d), rate >= cd - 1, equality iff (x-1) does not divide q.
/// U: p(x^d) / ((1+...+x^{d-1}) q(x^d)), rate >= d(c-1) + 1, equality iff (x-1) does not divide p.
inline TransportedConvergent transport(int d, Origin origin, const Convergent& conv, const LaurentSeries& g) {
    if (!conv.rate) throw InvalidParameter("transport needs a convergent with known rate");
    TransportedConvergent t;
    t.source = conv;
    t.origin = origin;
    const Degree c = *conv.rate;
    const RatPoly ps = poly_substitute_power(conv.p, d), qs = poly_substitute_power(conv.q, d);
    if (origin == Origin::H) {
        t.result_p = x_minus_one() * ps;
        t.result_q = qs;
        t.claimed_rate_lower_bound = c * d - 1;
        t.exact_rate_condition = !divisible_by_x_minus_one(conv.q);
    } else {
        t.result_p = ps;
        t.result_q = geometric_sum(d) * qs;
        t.claimed_rate_lower_bound = d * (c - 1) + 1;
        t.exact_rate_condition = !divisible_by_x_minus_one(conv.p);
    }
    t.measured_rate = detail::measured_rate(g, t.result_p, t.result_q);
    const std::string tag = std::string("transport from ") + to_string(origin) + " of convergent " +
                            std::to_string(conv.index);
    if (t.measured_rate < t.claimed_rate_lower_bound)
        throw RateViolation(tag + ": rate " + std::to_string(t.measured_rate) + " below bound " +
                            std::to_string(t.claimed_rate_lower_bound));
    if ((t.measured_rate == t.claimed_rate_lower_bound) != t.exact_rate_condition)
        throw RateViolation(tag + ": equality with the bound does not match the divisibility condition");
    return t;
}

enum class Exchange { UToH, HToU };

struct ExchangeResult {
    RatPoly p, q;
    Degree measured_rate = 0;
};

/// U->H: p / ((x-1) q) against h_d; H->U: (x-1) p / q against u_d. Rate drops by at most one.
inline ExchangeResult exchange_x_minus_one(int d, Exchange dir, const RatPoly& p, const RatPoly& q, Degree c,
                                           Degree floor) {
    ExchangeResult r;
    const SeriesKind target = dir == Exchange::UToH ? SeriesKind::H : SeriesKind::U;
    if (dir == Exchange::UToH) {
        r.p = p;
        r.q = x_minus_one() * q;
    } else {
        r.p = x_minus_one() * p;
        r.q = q;
    }
    r.measured_rate = detail::measured_rate(generate_series({d, target, floor}), r.p, r.q);
    if (r.measured_rate < c - 1)
        throw RateViolation("exchange lost more than one unit of rate: " + std::to_string(r.measured_rate) +
                            " < " + std::to_string(c - 1));
    return r;
}

// ---------------------------------------------------------------------------
// Classification of the convergents of g_d
// ---------------------------------------------------------------------------

struct Classification {
    std::size_t m = 0;
    Origin origin = Origin::H;
    std::size_t source_t = 0;
    Convergent source;
};

/// Holds expansions of g_d, h_d and u_d deep enough to classify convergents 0..depth of g_d.
class ConvergentClassifier {
public:
    ConvergentClassifier(int d, std::size_t depth) : d_(d) {
        if (d < 2) throw InvalidParameter("d must be >= 2");
        g_ = expand_family(d, SeriesKind::G, depth);
        const std::size_t half = depth / 2 + 2;
        h_ = expand_family(d, SeriesKind::H, half);
        u_ = expand_family(d, SeriesKind::U, half);
    }

    const CFExpansion& g() const noexcept { return g_; }
    const CFExpansion& h() const noexcept { return h_; }
    const CFExpansion& u() const noexcept { return u_; }

    /// Odd m come from u_d, even m from h_d.
    Classification classify(std::size_t m) const {
        if (m >= g_.size()) throw InvalidParameter("index beyond classifier depth");
        const RatPoly& pm = g_.convergents[m].p;
        const RatPoly& qm = g_.convergents[m].q;
        Classification out;
        out.m = m;
        RatPoly core_p, core_q;
        if (m % 2 == 1) {
            out.origin = Origin::U;
            auto [quot, rem] = poly_divmod(qm, geometric_sum(d_));
            if (!rem.is_zero() || !is_polynomial_in_power(quot, d_) || !is_polynomial_in_power(pm, d_))
                throw ClassificationFailure(m);
            core_q = poly_contract_power(quot, d_);
            core_p = poly_contract_power(pm, d_);
        } else {
            out.origin = Origin::H;
            auto [quot, rem] = poly_divmod(pm, x_minus_one());
            if (!rem.is_zero() || !is_polynomial_in_power(qm, d_) || !is_polynomial_in_power(quot, d_))
                throw ClassificationFailure(m);
            core_q = poly_contract_power(qm, d_);
            core_p = poly_contract_power(quot, d_);
        }
        const CFExpansion& src = out.origin == Origin::U ? u_ : h_;
        for (const Convergent& c : src.convergents) {
            if (c.q.degree() < core_q.degree()) continue;
            if (c.q.degree() > core_q.degree()) break;
            const Rational s = core_q.leading_coefficient() / c.q.leading_coefficient();
            if (core_q != c.q * s || core_p != c.p * s) break;
            const bool excluded = out.origin == Origin::U ? divisible_by_x_minus_one(c.p) : divisible_by_x_minus_one(c.q);
            if (excluded) break;
            out.source_t = c.index;
            out.source = c;
            return out;
        }
        throw ClassificationFailure(m);
    }

private:
    int d_;
    CFExpansion g_, h_, u_;
};

// ---------------------------------------------------------------------------
// Two-term monic recurrence and its parameters
// ---------------------------------------------------------------------------

struct BetaSequence {
    int d = 0;
    std::vector<Rational> betas;               // betas[n] for n = 0..N; betas[0] = betas[1] = 0
    std::vector<RatPoly> monic_denominators;   // q_hat_0 .. q_hat_N
    std::vector<Rational> sub_leading_a;       // d = 3: a_n
    std::vector<Rational> sub_sub_leading_b;   // d = 3: b_n
};

/// q_hat_n = A_n q_hat_{n-1} + beta_n q_hat_{n-2}, A_n = 1+x+...+x^{d-1} for odd n, x-1 for even n.
inline std::vector<RatPoly> monic_recurrence(int d, const std::vector<Rational>& betas, std::size_t n) {
    if (betas.size() < n + 1) throw InvalidParameter("not enough betas for the requested length");
    std::vector<RatPoly> q{RatPoly::constant(Rational(1))};
    const RatPoly odd = geometric_sum(d), even = x_minus_one();
    for (std::size_t i = 1; i <= n; ++i) {
        RatPoly next = (i % 2 == 1 ? odd : even) * q[i - 1];
        if (i >= 2) next += betas[i] * q[i - 2];
        q.push_back(std::move(next));
    }
    return q;
}

namespace detail {

// Coefficients a_n, b_n at deg-3, deg-6 of q_hat_n (even n) or q_hat_n / (x^2+x+1) (odd n).
inline void fill_cubic_coefficients(BetaSequence& s) {
    const RatPoly s3 = geometric_sum(3);
    for (std::size_t n = 0; n < s.monic_denominators.size(); ++n) {
        RatPoly core = s.monic_denominators[n];
        if (n % 2 == 1) {
            auto [quot, rem] = poly_divmod(core, s3);
            if (!rem.is_zero()) throw ShapeViolation(n, "odd denominator not divisible by x^2+x+1");
            core = std::move(quot);
        }
        const Degree top = core.degree();
        s.sub_leading_a.push_back(top >= 3 ? core.coefficient(top - 3) : Rational(0));
        s.sub_sub_leading_b.push_back(top >= 6 ? core.coefficient(top - 6) : Rational(0));
    }
}

}  // namespace detail

/// Extracts beta_n by exact division of q_hat_n - A_n q_hat_{n-1} by q_hat_{n-2}.
/// A nonzero remainder or a non-constant quotient is a ShapeViolation at n.
inline BetaSequence extract_betas(int d, const CFExpansion& cf) {
    BetaSequence s;
    s.d = d;
    const MonicCF m = monic_normalize(cf);
    s.monic_denominators = m.monic_denominators;
    s.betas.assign(2, Rational(0));
    const RatPoly odd = geometric_sum(d), even = x_minus_one();
    const auto& q = s.monic_denominators;
    for (std::size_t n = 1; n < q.size(); ++n) {
        const RatPoly diff = q[n] - (n % 2 == 1 ? odd : even) * q[n - 1];
        if (n == 1) {
            if (!diff.is_zero()) throw ShapeViolation(1, "first denominator is not 1+x+...+x^{d-1}");
            continue;
        }
        auto [beta, rem] = poly_divmod(diff, q[n - 2]);
        if (!rem.is_zero() || beta.degree() > 0)
            throw ShapeViolation(n, "difference is not a scalar multiple of the denominator two steps back");
        s.betas.push_back(beta.coefficient(0));
        if (s.betas[n] != m.betas[n]) throw Error("internal: extracted beta disagrees with monic normalization");
    }
    if (d == 3) detail::fill_cubic_coefficients(s);
    return s;
}

inline BetaSequence beta_sequence(int d, std::size_t n) { return extract_betas(d, expand_family(d, SeriesKind::G, n)); }

/// d = 2 closed recurrence: beta_{2k+1} = -beta_{k+1}/beta_{2k}, beta_{2k+2} = 1 + (-1)^k - beta_{2k+1}.
inline std::vector<Rational> binary_beta_recurrence(std::size_t n) {
    if (n < 4) throw InvalidParameter("need n >= 4");
    std::vector<Rational> b{Rational(0), Rational(0), Rational(2), Rational(-1), Rational(1)};
    for (std::size_t k = 2; b.size() <= n; ++k) {
        if (b[2 * k] == 0) throw ZeroDenominator("beta_" + std::to_string(2 * k) + " vanishes");
        b.push_back(-b[k + 1] / b[2 * k]);
        b.push_back(Rational(k % 2 == 0 ? 2 : 0) - b[2 * k + 1]);
    }
    b.resize(n + 1);
    return b;
}

// ---------------------------------------------------------------------------
// Identity checks
// ---------------------------------------------------------------------------

enum class Identity {
    FunctionalEquation,    // funceq
    CubeSubstitution,      // q_{6k} = q_{2k}(x^3), p_{6k} ~ x^3 (x-1) p_{2k}(x^3)
    BetaProduct,           // beta_{6k+6} beta_{6k+4} beta_{6k+2} = beta_{2k+2}
    BetaSum,               // sum_{i=1..6} beta_{6k+i} = 3
    BetaPairSum,           // sum_{j-i>1} beta_{6k+i} beta_{6k+j} = 3 + beta_{6k} beta_{6k+1}
    CoefficientRelations,  // a_n, b_n against beta
    Classification,        // every convergent of g_d comes from h_d or u_d
    BinaryRecurrence,      // d = 2 closed recurrence equals the extracted betas
};

inline const char* to_string(Identity id) {
    switch (id) {
        case Identity::FunctionalEquation: return "funceq";
        case Identity::CubeSubstitution: return "cube-substitution";
        case Identity::BetaProduct: return "beta-product";
        case Identity::BetaSum: return "beta-sum";
        case Identity::BetaPairSum: return "beta-pair-sum";
        case Identity::CoefficientRelations: return "coefficient-relations";
        case Identity::Classification: return "classification";
        case Identity::BinaryRecurrence: return "binary-recurrence";
    }
    return "?";
}

inline std::optional<Identity> parse_identity(const std::string& s) {
    for (Identity id : {Identity::FunctionalEquation, Identity::CubeSubstitution, Identity::BetaProduct,
                        Identity::BetaSum, Identity::BetaPairSum, Identity::CoefficientRelations,
                        Identity::Classification, Identity::BinaryRecurrence})
        if (s == to_string(id)) return id;
    return std::nullopt;
}

struct IdentityReport {
    Identity identity = Identity::BetaSum;
    int d = 0;
    std::int64_t lo = 0, hi = 0;
    std::vector<std::int64_t> failures;
    std::vector<std::string> notes;

    bool passed() const noexcept { return failures.empty(); }
    void require() const {
        if (!passed()) throw IdentityFailure(to_string(identity), failures.front());
    }
};

namespace detail {

inline void require_d3(Identity id, int d) {
    if (d != 3) throw InvalidParameter(std::string(to_string(id)) + " is a d = 3 identity");
}

}  // namespace detail

/// Identity checks on an existing beta sequence (and expansion, for CubeSubstitution).
/// k ranges over [lo, hi]; indices past the data are an InvalidParameter.
inline IdentityReport check_beta_identity(Identity id, const BetaSequence& s, const CFExpansion& cf,
                                          std::int64_t lo, std::int64_t hi) {
    detail::require_d3(id, s.d);
    IdentityReport r{id, s.d, lo, hi, {}, {}};
    const auto& b = s.betas;
    const auto need = [&](std::int64_t idx) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= b.size())
            throw InvalidParameter("identity range needs index " + std::to_string(idx) + " beyond the expansion");
    };
    for (std::int64_t k = lo; k <= hi; ++k) {
        bool ok = true;
        switch (id) {
            case Identity::CubeSubstitution: {
                need(6 * k);
                const auto& q = s.monic_denominators;
                ok = q[6 * k] == poly_substitute_power(q[2 * k], 3);
                const RatPoly rhs = RatPoly::monomial(Rational(1), 3) * x_minus_one() *
                                    poly_substitute_power(cf.convergents[2 * k].p, 3);
                ok = ok && detail::proportional(cf.convergents[6 * k].p, rhs);
                break;
            }
            case Identity::BetaProduct:
                need(6 * k + 6);
                ok = b[6 * k + 6] * b[6 * k + 4] * b[6 * k + 2] == b[2 * k + 2];
                break;
            case Identity::BetaSum: {
                need(6 * k + 6);
                Rational sum(0);
                for (int i = 1; i <= 6; ++i) sum += b[6 * k + i];
                ok = sum == 3;
                break;
            }
            case Identity::BetaPairSum: {
                need(6 * k + 6);
                Rational sum(0);
                for (int i = 1; i <= 6; ++i)
                    for (int j = i + 2; j <= 6; ++j) sum += b[6 * k + i] * b[6 * k + j];
                ok = sum == 3 + b[6 * k] * b[6 * k + 1];
                break;
            }
            case Identity::CoefficientRelations: {
                // a_{6k} = b_{6k} = 0 and the step relations at n = 2k, 2k+1
                need(6 * k);
                need(2 * k + 1);
                const auto& a = s.sub_leading_a;
                const auto& bb = s.sub_sub_leading_b;
                ok = a[6 * k] == 0 && bb[6 * k] == 0;
                if (k >= 1) {
                    const std::size_t e = 2 * k, o = 2 * k + 1;
                    const Rational a_em2 = e >= 2 ? a[e - 2] : Rational(0);
                    ok = ok && a[e] - a[e - 1] == b[e] - 1 && a[o] - a[e] == b[o];
                    ok = ok && bb[e] - bb[e - 1] == b[e] * a_em2 - a[e - 1] && bb[o] - bb[e] == b[o] * a[e - 1];
                } else {
                    ok = ok && a[1] - a[0] == b[1];
                }
                break;
            }
            default:
                throw InvalidParameter("not a beta identity");
        }
        if (!ok) r.failures.push_back(k);
    }
    if (id == Identity::BetaSum || id == Identity::BetaPairSum || id == Identity::CoefficientRelations)
        if (lo == 0) r.notes.push_back("k = 0 uses beta_0 = beta_1 = 0 (q_{-1} = 0)");
    return r;
}

/// Classification check for m in [lo, hi]: odd m must come from u_d, even m from h_d.
inline IdentityReport check_classification(int d, std::int64_t lo, std::int64_t hi) {
    IdentityReport r{Identity::Classification, d, lo, hi, {}, {}};
    const ConvergentClassifier cls(d, static_cast<std::size_t>(hi));
    for (std::int64_t m = lo; m <= hi; ++m) {
        try {
            const Classification c = cls.classify(static_cast<std::size_t>(m));
            if ((c.origin == Origin::U) != (m % 2 == 1)) r.failures.push_back(m);
        } catch (const ClassificationFailure&) {
            r.failures.push_back(m);
        }
    }
    return r;
}

/// Closed d = 2 recurrence against betas extracted from the expansion, indices 2..n.
inline IdentityReport check_binary_recurrence(std::size_t n) {
    IdentityReport r{Identity::BinaryRecurrence, 2, 2, static_cast<std::int64_t>(n), {}, {}};
    const auto closed = binary_beta_recurrence(n);
    const auto oracle = beta_sequence(2, n).betas;
    for (std::size_t i = 2; i <= n; ++i)
        if (closed[i] != oracle[i]) r.failures.push_back(static_cast<std::int64_t>(i));
    return r;
}

inline IdentityReport check_functional_equation(int d, Degree floor) {
    IdentityReport r{Identity::FunctionalEquation, d, floor, 0, {}, {}};
    try {
        const auto rep = verify_functional_equations(d, floor);
        r.notes.push_back("verified down to degree " + std::to_string(rep.verified_floor));
    } catch (const MismatchAt& e) {
        r.failures.push_back(e.degree());
        r.notes.push_back(e.what());
    }
    return r;
}

/// Dispatches any identity. For beta identities the expansion depth is derived from hi.
inline IdentityReport verify_identity(Identity id, int d, std::int64_t lo, std::int64_t hi) {
    switch (id) {
        case Identity::FunctionalEquation: return check_functional_equation(d, lo);
        case Identity::Classification: return check_classification(d, lo, hi);
        case Identity::BinaryRecurrence: return check_binary_recurrence(static_cast<std::size_t>(hi));
        default: break;
    }
    detail::require_d3(id, d);
    if (lo < 0 || hi < lo) throw InvalidParameter("bad identity range");
    const std::size_t depth = static_cast<std::size_t>(6 * hi + 6);
    const CFExpansion cf = expand_family(3, SeriesKind::G, depth);
    return check_beta_identity(id, extract_betas(3, cf), cf, lo, hi);
}

// ---------------------------------------------------------------------------
// d >= 4: explicit well-approximation
// ---------------------------------------------------------------------------

struct WellApproxEntry {
    int k = 0;
    Degree rate = 0;
    Degree expected = 0;  // d^{k+1} - 2 (d^{k+1}-1)/(d-1)
};

struct WellApproxReport {
    int d = 0;
    std::vector<WellApproxEntry> entries;
    bool strictly_increasing = true;
    std::optional<std::size_t> first_large_index;  // first i >= 1 with deg a_i >= d in the CF of g_d
    Degree first_large_degree = 0;
    std::optional<std::size_t> first_shape_violation;  // where the two-term recurrence breaks
};

inline Degree finite_product_expected_rate(int d, int k) {
    const Degree top = ipow(Integer(d), static_cast<unsigned long>(k + 1)).get_si();
    return top - 2 * (top - 1) / (d - 1);
}

inline WellApproxReport wellapprox_witness(int d, int k_max, std::size_t depth = 40) {
    if (d < 4) throw InvalidParameter("well-approximation witness needs d >= 4");
    WellApproxReport rep;
    rep.d = d;
    for (int k = 0; k <= k_max; ++k) {
        const FiniteProduct r = finite_product(d, k);
        const Degree top = ipow(Integer(d), static_cast<unsigned long>(k + 1)).get_si();
        const Degree rate = with_refloor(-(top + 16), -(1 << 22), [&](Degree floor) {
            auto c = rate_of_approximation(generate_series({d, SeriesKind::F, floor}), r.numerator, r.denominator);
            if (!c) throw RateViolation("finite product equals f_d");
            return *c;
        });
        const WellApproxEntry e{k, rate, finite_product_expected_rate(d, k)};
        if (e.rate != e.expected)
            throw RateViolation("finite product " + std::to_string(k) + " has rate " + std::to_string(e.rate) +
                                ", expected " + std::to_string(e.expected));
        if (!rep.entries.empty() && rate <= rep.entries.back().rate) rep.strictly_increasing = false;
        rep.entries.push_back(e);
    }
    const CFExpansion cf = expand_family(d, SeriesKind::G, depth);
    for (std::size_t i = 1; i < cf.partial_quotients.size(); ++i)
        if (cf.partial_quotients[i].degree() >= d) {
            rep.first_large_index = i;
            rep.first_large_degree = cf.partial_quotients[i].degree();
            break;
        }
    try {
        extract_betas(d, cf);
    } catch (const ShapeViolation& e) {
        rep.first_shape_violation = e.index();
    }
    return rep;
}

}  // namespace mahlercf
