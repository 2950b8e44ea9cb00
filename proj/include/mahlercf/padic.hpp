#pragma once

// Modular side of the certification: multiplicative orders, Wieferich-type
// growth, exact divisibility of a^{d^n} - 1, witness search over convergent
// denominators of g_d, and Hensel lifting of their roots.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "contfrac.hpp"
#include "errors.hpp"
#include "poly.hpp"
#include "rational.hpp"

namespace mahlercf {

// ---------------------------------------------------------------------------
// Word-size modular arithmetic (moduli below 2^63)
// ---------------------------------------------------------------------------

using u64 = std::uint64_t;

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m); }

inline u64 powmod(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    for (; e; e >>= 1) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
    }
    return r;
}

/// Deterministic Miller-Rabin for all 64-bit n.
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37})
        if (n % p == 0) return n == p;
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) d >>= 1, ++s;
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s && composite; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) composite = false;
        }
        if (composite) return false;
    }
    return true;
}

inline std::vector<u64> primes_up_to(u64 bound) {
    std::vector<u64> out;
    if (bound < 2) return out;
    std::vector<bool> composite(bound + 1, false);
    for (u64 i = 2; i <= bound; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (u64 j = i * i; j <= bound; j += i) composite[j] = true;
    }
    return out;
}

inline std::vector<std::pair<Integer, unsigned>> factorize(Integer n) {
    std::vector<std::pair<Integer, unsigned>> f;
    for (Integer p = 2; p * p <= n; ++p) {
        unsigned e = 0;
        while (n % p == 0) n /= p, ++e;
        if (e) f.emplace_back(p, e);
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

// ---------------------------------------------------------------------------
// Orders and growth conditions
// ---------------------------------------------------------------------------

/// Least e >= 1 with a^e = 1 (mod m): start from phi(m) and strip prime factors.
inline Integer mult_order(const Integer& a, const Integer& m) {
    if (m < 2) throw InvalidParameter("modulus must be >= 2");
    if (gcd(a, m) != 1) throw NotCoprime(to_string(a) + " and " + to_string(m) + " share a factor");
    Integer phi = m;
    for (const auto& [p, e] : factorize(m)) phi = phi / p * (p - 1);
    Integer order = phi;
    for (const auto& [q, e] : factorize(phi))
        for (unsigned i = 0; i < e && order % q == 0; ++i) {
            if (powmod(a, order / q, m) != 1) break;
            order /= q;
        }
    return order;
}

inline void require_coprime(const Integer& a, const Integer& p) {
    if (mod(a, p) == 0) throw NotCoprime(to_string(p) + " divides " + to_string(a));
}

/// |<a> mod p^2| = p |<a> mod p|.
inline bool gamma_growth(const Integer& a, const Integer& p) {
    require_coprime(a, p);
    return mult_order(a, p * p) == p * mult_order(a, p);
}

/// a^{p-1} != 1 (mod p^2); a nonzero Fermat quotient forces gamma_growth.
inline bool fermat_quotient_nonzero(const Integer& a, const Integer& p) {
    require_coprime(a, p);
    const bool nonzero = powmod(a, p - 1, p * p) != 1;
    if (nonzero && !gamma_growth(a, p)) throw Error("nonzero Fermat quotient without order growth at " + to_string(p));
    return nonzero;
}

/// Odd primes p <= bound, p not dividing a, with a^{p-1} = 1 (mod p^2).
inline std::vector<u64> wieferich_scan(u64 a, u64 bound) {
    if (bound < 3) throw InvalidParameter("bound must be >= 3");
    std::vector<u64> hits;
    for (u64 p : primes_up_to(bound)) {
        if (p == 2 || a % p == 0) continue;
        const u64 p2 = p * p;
        if (powmod(a % p2, p - 1, p2) == 1) hits.push_back(p);
    }
    return hits;
}

/// p || N.
inline bool exact_divisibility(const Integer& p, const Integer& N) {
    if (N == 0) throw InvalidParameter("N must be nonzero");
    return N % p == 0 && N % (p * p) != 0;
}

/// a^{d^n} mod m by n successive d-th powers.
inline Integer iterated_power_mod(const Integer& a, unsigned d, std::uint64_t n, const Integer& m) {
    Integer r = mod(a, m);
    for (std::uint64_t i = 0; i < n; ++i) r = powmod(r, Integer(d), m);
    return r;
}

/// p || a^{d^n} - 1 decided from the residue mod p^2 alone.
inline bool exact_divisibility_of_power(const Integer& p, const Integer& a, unsigned d, std::uint64_t n) {
    const Integer r = iterated_power_mod(a, d, n, p * p);
    return mod(r - 1, p) == 0 && r != 1;
}

struct GammaLadder {
    Integer a, p;
    std::vector<Integer> orders;  // orders[k-1] = |<a> mod p^k|, k = 1..M+1
};

/// Checks |<a> mod p^{m+1}| = p^m |<a> mod p| for m = 1..M.
inline GammaLadder power_ladder_check(const Integer& a, const Integer& p, unsigned M) {
    if (M < 1) throw InvalidParameter("M must be >= 1");
    if (!gamma_growth(a, p)) throw HypothesisFailed("order of " + to_string(a) + " does not grow from " + to_string(p) + " to its square");
    GammaLadder g{a, p, {}};
    Integer pk = p;
    for (unsigned k = 1; k <= M + 1; ++k, pk *= p) g.orders.push_back(mult_order(a, pk));
    for (unsigned m = 1; m <= M; ++m)
        if (g.orders[m] != ipow(p, m) * g.orders[0])
            throw Error("order ladder breaks at power " + std::to_string(m + 1));
    return g;
}

// ---------------------------------------------------------------------------
// Convergent denominators in integer form
// ---------------------------------------------------------------------------

/// Integer-primitive q_t of g_d for t = 0..T, with q_t'(1).
struct DenominatorTable {
    int d = 0;
    CFExpansion cf;
    std::vector<IntPolyWithContent> q;
    std::vector<Integer> derivative_at_one;

    static DenominatorTable build(int d, std::size_t t_bound) {
        DenominatorTable tab;
        tab.d = d;
        tab.cf = expand_family(d, SeriesKind::G, t_bound);
        for (const Convergent& c : tab.cf.convergents) {
            tab.q.push_back(poly_normalize_integer(c.q));
            Integer s(0);
            const auto& co = tab.q.back().primitive.coeffs;
            for (std::size_t i = 1; i < co.size(); ++i) s += co[i] * static_cast<unsigned long>(i);
            tab.derivative_at_one.push_back(s);
        }
        return tab;
    }

    std::size_t size() const noexcept { return q.size(); }
    const IntPoly& primitive(std::size_t t) const { return q.at(t).primitive; }
};

namespace detail {

// Coefficients reduced mod m (m < 2^63) for fast repeated Horner evaluation.
inline std::vector<u64> reduce_coeffs(const IntPoly& q, u64 m) {
    std::vector<u64> out;
    out.reserve(q.coeffs.size());
    const Integer M(static_cast<unsigned long>(m));
    for (const Integer& c : q.coeffs) out.push_back(mod(c, M).get_ui());
    return out;
}

inline u64 horner(const std::vector<u64>& c, u64 x, u64 m) {
    u64 acc = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = mulmod(acc, x, m) + *it;
        if (acc >= m) acc -= m;
    }
    return acc;
}

inline unsigned worker_count() {
    if (const char* env = std::getenv("MAHLERCF_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Condition checker
// ---------------------------------------------------------------------------

struct ConditionReport {
    bool c1 = false;  // p prime (odd for d=2, >= 5 for d=3) and p || a^{d^{n0}} - 1
    bool c2 = false;  // order of d grows from p to p^2
    bool c3 = false;  // q_t(a^{d^{n0}}) = 0 mod p^2 (and t even for d=3)
    bool c4 = false;  // q_t'(1) != 0 mod p
    Integer residue;            // a^{d^{n0}} mod p^2
    Integer value_mod_p2;       // q_t(residue) mod p^2
    Integer derivative_mod_p;   // q_t'(1) mod p
    bool all() const noexcept { return c1 && c2 && c3 && c4; }
};

/// qt is the integer-primitive denominator; its leading coefficient is d_t, the
/// common denominator of the monic form, and must be invertible mod p.
inline ConditionReport check_conditions(const Integer& a, int d, const Integer& p, std::uint64_t n0, std::size_t t,
                                        const IntPoly& qt) {
    if (d != 2 && d != 3) throw InvalidParameter("conditions are defined for d = 2 and d = 3");
    if (qt.is_zero()) throw ZeroPolynomial();
    if (mod(qt.leading_coefficient(), p) == 0)
        throw ScaleNotInvertible("p = " + to_string(p) + " divides the scale of q_" + std::to_string(t));
    ConditionReport r;
    const Integer p2 = p * p;
    const bool prime = p >= 2 && p.fits_ulong_p() && is_prime(p.get_ui());
    r.residue = iterated_power_mod(a, static_cast<unsigned>(d), n0, p2);
    r.c1 = prime && (d == 2 ? p != 2 : p >= 5) && n0 >= 1 && mod(r.residue - 1, p) == 0 && r.residue != 1;
    r.c2 = prime && mod(Integer(d), p) != 0 && gamma_growth(Integer(d), p);
    r.value_mod_p2 = poly_eval_mod(qt, r.residue, p2);
    r.c3 = (d == 2 || t % 2 == 0) && r.value_mod_p2 == 0;
    r.derivative_mod_p = poly_eval_mod(qt.derivative(), Integer(1), p);
    r.c4 = r.derivative_mod_p != 0;
    return r;
}

// ---------------------------------------------------------------------------
// Witness search
// ---------------------------------------------------------------------------

struct BadApproxWitness {
    Integer a;
    int d = 0;
    u64 p = 0;
    std::uint64_t n0 = 0;
    std::size_t t = 0;
    Integer residue;
    ConditionReport conditions;
    IntPoly qt;
};

struct SearchBounds {
    u64 p_min = 3;
    u64 p_bound = 40;
    std::uint64_t n0_bound = 16;
    std::size_t t_bound = 200;
};

/// Furthest stage reached for one prime when no witness was found there.
enum class Stage { Skipped, GrowthFails, NoAdmissibleN0, NoRoot, DerivativeVanishes, ScaleOnly, Found };

inline const char* to_string(Stage s) {
    switch (s) {
        case Stage::Skipped: return "p divides a";
        case Stage::GrowthFails: return "c2";
        case Stage::NoAdmissibleN0: return "c1";
        case Stage::NoRoot: return "c3";
        case Stage::DerivativeVanishes: return "c4";
        case Stage::ScaleOnly: return "scale not invertible";
        case Stage::Found: return "found";
    }
    return "?";
}

struct PrimeOutcome {
    u64 p = 0;
    Stage stage = Stage::Skipped;
    std::size_t scale_skips = 0;
};

struct SearchResult {
    std::optional<BadApproxWitness> witness;
    std::vector<PrimeOutcome> primes;  // every prime examined, ascending
};

namespace detail {

struct PrimeHit {
    PrimeOutcome outcome;
    std::optional<std::pair<std::size_t, std::uint64_t>> hit;  // (t, n0)
    u64 residue = 0;
};

// First (t, n0) for a single prime in lexicographic order.
inline PrimeHit search_prime(const Integer& a, int d, u64 p, const SearchBounds& b, const DenominatorTable& tab) {
    PrimeHit out;
    out.outcome.p = p;
    const u64 p2 = p * p;
    const u64 am = mod(a, Integer(static_cast<unsigned long>(p2))).get_ui();
    if (am % p == 0) return out;
    if (!gamma_growth(Integer(d), Integer(static_cast<unsigned long>(p)))) {
        out.outcome.stage = Stage::GrowthFails;
        return out;
    }
    std::vector<std::pair<std::uint64_t, u64>> admissible;
    u64 r = am;
    for (std::uint64_t n0 = 1; n0 <= b.n0_bound; ++n0) {
        r = powmod(r, static_cast<u64>(d), p2);
        if (r % p == 1 % p && r != 1) admissible.emplace_back(n0, r);
    }
    if (admissible.empty()) {
        out.outcome.stage = Stage::NoAdmissibleN0;
        return out;
    }
    out.outcome.stage = Stage::NoRoot;
    const std::size_t t_max = std::min(b.t_bound, tab.size() - 1);
    bool any_usable = false;
    for (std::size_t t = 1; t <= t_max; ++t) {
        if (d == 3 && t % 2 == 1) continue;
        const IntPoly& q = tab.primitive(t);
        if (mod(q.leading_coefficient(), Integer(static_cast<unsigned long>(p))) == 0) {
            ++out.outcome.scale_skips;
            continue;
        }
        any_usable = true;
        const auto c = reduce_coeffs(q, p2);
        const bool deriv_ok = mod(tab.derivative_at_one[t], Integer(static_cast<unsigned long>(p))) != 0;
        for (const auto& [n0, res] : admissible) {
            if (horner(c, res, p2) != 0) continue;
            if (!deriv_ok) {
                out.outcome.stage = Stage::DerivativeVanishes;
                break;
            }
            out.outcome.stage = Stage::Found;
            out.hit = std::make_pair(t, n0);
            out.residue = res;
            return out;
        }
    }
    if (!any_usable) out.outcome.stage = Stage::ScaleOnly;
    return out;
}

}  // namespace detail

/// Scans primes in [p_min, p_bound]; within a prime, t ascending then n0 ascending.
/// Primes are searched concurrently; the result is the witness of the smallest prime.
inline SearchResult witness_search(const Integer& a, int d, const SearchBounds& b, const DenominatorTable& tab) {
    if (a < 2) throw InvalidParameter("a must be >= 2");
    if (d != 2 && d != 3) throw InvalidParameter("witness search is defined for d = 2 and d = 3");
    if (tab.d != d) throw InvalidParameter("denominator table built for another d");
    if (b.p_bound < 2 || b.n0_bound < 1 || b.t_bound < 1) throw InvalidParameter("bounds must be positive");

    std::vector<u64> primes;
    for (u64 p : primes_up_to(b.p_bound))
        if (p >= b.p_min && p >= (d == 2 ? 3u : 5u)) primes.push_back(p);

    std::vector<detail::PrimeHit> hits(primes.size());
    const unsigned workers = std::min<unsigned>(detail::worker_count(), std::max<std::size_t>(1, primes.size()));
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < primes.size(); i += workers) hits[i] = detail::search_prime(a, d, primes[i], b, tab);
        }));
    for (auto& j : jobs) j.get();

    SearchResult res;
    for (const auto& h : hits) {
        res.primes.push_back(h.outcome);
        if (!h.hit) continue;
        BadApproxWitness w;
        w.a = a;
        w.d = d;
        w.p = h.outcome.p;
        w.t = h.hit->first;
        w.n0 = h.hit->second;
        w.residue = Integer(static_cast<unsigned long>(h.residue));
        w.qt = tab.primitive(w.t);
        w.conditions = check_conditions(a, d, Integer(static_cast<unsigned long>(w.p)), w.n0, w.t, w.qt);
        if (!w.conditions.all() || w.conditions.residue != w.residue)
            throw Error("internal: witness failed independent re-validation");
        res.witness = std::move(w);
        break;
    }
    return res;
}

inline ConditionReport revalidate(const BadApproxWitness& w) {
    return check_conditions(w.a, w.d, Integer(static_cast<unsigned long>(w.p)), w.n0, w.t, w.qt);
}

// ---------------------------------------------------------------------------
// Residue table for d = 2
// ---------------------------------------------------------------------------

struct TableRow {
    u64 p = 0;
    std::size_t t = 0;
    u64 residue = 0;           // root of q_t mod p^2, = 1 mod p, != 1 mod p^2
    std::vector<u64> classes;  // a mod p^2 with a^{d^n} = residue for some n >= 1
};

/// All (t, residue) with q_t(residue) = 0 mod p^2, residue a nontrivial 1-unit,
/// q_t'(1) != 0 mod p and p not dividing the scale, for t = 1..t_bound.
inline std::vector<TableRow> residue_table(u64 p, std::size_t t_bound, const DenominatorTable& tab) {
    if (!is_prime(p) || p == 2) throw InvalidParameter("table rows need an odd prime");
    const u64 p2 = p * p;
    const int d = tab.d;
    std::vector<TableRow> rows;
    const std::size_t t_max = std::min(t_bound, tab.size() - 1);
    for (std::size_t t = 1; t <= t_max; ++t) {
        if (d == 3 && t % 2 == 1) continue;
        const IntPoly& q = tab.primitive(t);
        if (mod(q.leading_coefficient(), Integer(static_cast<unsigned long>(p))) == 0) continue;
        if (mod(tab.derivative_at_one[t], Integer(static_cast<unsigned long>(p))) == 0) continue;
        const auto c = detail::reduce_coeffs(q, p2);
        for (u64 k = 1; k < p; ++k)
            if (detail::horner(c, 1 + k * p, p2) == 0) rows.push_back({p, t, 1 + k * p, {}});
    }
    // a reaches r iff r = a^{d^n} for some n >= 1; within p^2 steps the orbit has cycled.
    std::map<u64, std::vector<u64>> reach;
    for (const auto& row : rows) reach.emplace(row.residue, std::vector<u64>{});
    for (u64 a = 1; a < p2 && !reach.empty(); ++a) {
        if (a % p == 0) continue;
        std::vector<u64> hit;
        u64 x = a;
        for (u64 n = 1; n <= p2; ++n) {
            x = powmod(x, static_cast<u64>(d), p2);
            if (reach.count(x) && std::find(hit.begin(), hit.end(), x) == hit.end()) hit.push_back(x);
        }
        for (u64 r : hit) reach[r].push_back(a);
    }
    for (auto& row : rows) row.classes = reach[row.residue];
    return rows;
}

/// a mod p^2 classes passing the residue conditions for (p, t): a^{d^n} is a root of q_t for some n >= 1.
inline std::vector<u64> passing_classes(u64 p, const IntPoly& qt, int d) {
    const u64 p2 = p * p;
    const auto c = detail::reduce_coeffs(qt, p2);
    std::vector<u64> out;
    for (u64 a = 1; a < p2; ++a) {
        if (a % p == 0) continue;
        u64 x = a;
        for (u64 n = 1; n <= p2; ++n) {
            x = powmod(x, static_cast<u64>(d), p2);
            if (x % p == 1 && x != 1 && detail::horner(c, x, p2) == 0) {
                out.push_back(a);
                break;
            }
        }
    }
    return out;
}

/// Least n0 >= 1 with p || a^{d^{n0}} - 1 and q_t(a^{d^{n0}}) = 0 mod p^2, if any up to n0_bound.
inline std::optional<std::uint64_t> minimal_n0(const Integer& a, int d, u64 p, const IntPoly& qt,
                                               std::uint64_t n0_bound) {
    const u64 p2 = p * p;
    const auto c = detail::reduce_coeffs(qt, p2);
    u64 x = mod(a, Integer(static_cast<unsigned long>(p2))).get_ui();
    if (x % p == 0) return std::nullopt;
    for (std::uint64_t n = 1; n <= n0_bound; ++n) {
        x = powmod(x, static_cast<u64>(d), p2);
        if (x % p == 1 && x != 1 && detail::horner(c, x, p2) == 0) return n;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Hensel lifting
// ---------------------------------------------------------------------------

struct HenselResult {
    std::uint64_t n = 0;
    Integer lifted_root;  // root of q_t mod p^m congruent to the witness residue mod p^2
    Integer modulus;      // p^m
};

/// Lifts the witness root to p^m by Newton steps, then finds n >= n0 with
/// a^{d^n} equal to it mod p^m, so that p^m divides q_t(a^{d^n}).
inline HenselResult hensel_divisibility_demo(const BadApproxWitness& w, unsigned m, std::uint64_t cap = 0) {
    if (m < 2) throw InvalidParameter("m must be >= 2");
    const Integer p(static_cast<unsigned long>(w.p));
    const Integer pm = ipow(p, m);
    if (cap == 0) cap = 4 * ipow(p, m - 1).get_ui();
    const IntPoly dq = w.qt.derivative();

    Integer root = w.residue, mk = p * p;
    for (unsigned k = 2; k < m; ++k) {
        mk *= p;
        const Integer f = poly_eval_mod(w.qt, root, mk);
        const Integer fp = poly_eval_mod(dq, root, mk);
        Integer inv;
        if (mpz_invert(inv.get_mpz_t(), fp.get_mpz_t(), mk.get_mpz_t()) == 0)
            throw HypothesisFailed("derivative not invertible during lifting");
        root = mod(root - f * inv, mk);
    }
    if (poly_eval_mod(w.qt, root, pm) != 0) throw Error("internal: lifted value is not a root");

    Integer x = iterated_power_mod(w.a, static_cast<unsigned>(w.d), w.n0, pm);
    for (std::uint64_t n = w.n0; n <= w.n0 + cap; ++n) {
        if (x == root) {
            if (poly_eval_mod(w.qt, x, pm) != 0) throw Error("internal: matching power is not a root");
            return {n, root, pm};
        }
        x = powmod(x, Integer(w.d), pm);
    }
    throw SearchExhausted(cap);
}

}  // namespace mahlercf
