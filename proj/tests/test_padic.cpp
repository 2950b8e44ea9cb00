#include <gtest/gtest.h>

#include <cstdlib>
#include <set>

#include "generators.hpp"
#include "mahlercf/padic.hpp"

using namespace mahlercf;

namespace {

const DenominatorTable& table(int d) {
    static const DenominatorTable t2 = DenominatorTable::build(2, 200);
    static const DenominatorTable t3 = DenominatorTable::build(3, 40);
    return d == 2 ? t2 : t3;
}

Integer Z(long v) { return Integer(v); }

// q(x) mod m through a full big-integer evaluation
Integer slow_eval_mod(const IntPoly& q, const Integer& x, const Integer& m) {
    const Rational v = q.to_rat().evaluate(Rational(x));
    return mod(v.get_num(), m);
}

struct ThreadsEnv {
    explicit ThreadsEnv(const char* n) { setenv("MAHLERCF_THREADS", n, 1); }
    ~ThreadsEnv() { unsetenv("MAHLERCF_THREADS"); }
};

}  // namespace

TEST(Primes, SmallCases) {
    EXPECT_EQ(primes_up_to(30), (std::vector<u64>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29}));
    EXPECT_TRUE(is_prime(1000003));
    EXPECT_FALSE(is_prime(3215031751ULL));  // strong pseudoprime to bases 2, 3, 5, 7
    EXPECT_FALSE(is_prime(1));
}

TEST(MultOrder, Examples) {
    EXPECT_EQ(mult_order(Z(2), Z(7)), 3);
    EXPECT_EQ(mult_order(Z(2), Z(49)), 21);
}

TEST(MultOrder, Rejects) {
    EXPECT_THROW(mult_order(Z(2), Z(1)), InvalidParameter);
    EXPECT_THROW(mult_order(Z(14), Z(49)), NotCoprime);
    EXPECT_THROW(gamma_growth(Z(7), Z(7)), NotCoprime);
}

TEST(Growth, WieferichPrimesBlockGrowth) {
    EXPECT_TRUE(gamma_growth(Z(2), Z(7)));
    EXPECT_FALSE(gamma_growth(Z(2), Z(1093)));
    EXPECT_FALSE(fermat_quotient_nonzero(Z(2), Z(1093)));
    EXPECT_TRUE(fermat_quotient_nonzero(Z(2), Z(7)));
    EXPECT_EQ(wieferich_scan(2, 4000), (std::vector<u64>{1093, 3511}));
    EXPECT_EQ(wieferich_scan(3, 100), (std::vector<u64>{11}));
}

TEST(Growth, OrderLadder) {
    const GammaLadder g = power_ladder_check(Z(2), Z(3), 5);
    EXPECT_EQ(g.orders, (std::vector<Integer>{Z(2), Z(6), Z(18), Z(54), Z(162), Z(486)}));
    EXPECT_THROW(power_ladder_check(Z(2), Z(1093), 2), HypothesisFailed);
    EXPECT_THROW(power_ladder_check(Z(2), Z(3), 0), InvalidParameter);
}

TEST(ExactDivisibility, Examples) {
    EXPECT_TRUE(exact_divisibility(Z(7), Z(2 * 2 * 2 * 2 * 2 * 2 * 2 * 2 * 2 - 1)));  // 511 = 7 * 73
    EXPECT_FALSE(exact_divisibility(Z(7), Z(49)));
    EXPECT_THROW(exact_divisibility(Z(7), Z(0)), InvalidParameter);
    EXPECT_EQ(iterated_power_mod(Z(2), 3, 2, Z(49)), 21 + 1);
}

TEST(CheckConditions, CubicBaseTwo) {
    const IntPoly& q8 = table(3).primitive(8);
    const ConditionReport r = check_conditions(Z(2), 3, Z(7), 2, 8, q8);
    EXPECT_TRUE(r.all());
    EXPECT_EQ(r.residue, 22);
    EXPECT_EQ(r.value_mod_p2, 0);
    EXPECT_EQ(r.derivative_mod_p, 2);
}

TEST(CheckConditions, ScaleNotInvertible) {
    // q_8 of g_3 has leading coefficient 2
    EXPECT_THROW(check_conditions(Z(3), 3, Z(2), 1, 8, table(3).primitive(8)), ScaleNotInvertible);
    EXPECT_THROW(check_conditions(Z(3), 4, Z(7), 1, 8, table(3).primitive(8)), InvalidParameter);
}

TEST(WitnessSearch, BinaryBaseFifteen) {
    const SearchResult r = witness_search(Z(15), 2, {3, 11, 8, 50}, table(2));
    ASSERT_TRUE(r.witness);
    EXPECT_EQ(r.witness->p, 7u);
    EXPECT_EQ(r.witness->t, 41u);
    EXPECT_EQ(r.witness->n0, 3u);
    EXPECT_EQ(r.witness->residue, 15);
}

TEST(WitnessSearch, CubicBaseTwo) {
    const SearchResult r = witness_search(Z(2), 3, {}, table(3));
    ASSERT_TRUE(r.witness);
    EXPECT_EQ(r.witness->p, 7u);
    EXPECT_EQ(r.witness->t, 8u);
    EXPECT_EQ(r.witness->n0, 2u);
}

TEST(WitnessSearch, NotFoundAndBadBounds) {
    const SearchResult r = witness_search(Z(15), 2, {3, 5, 16, 200}, table(2));
    EXPECT_FALSE(r.witness);
    EXPECT_EQ(r.primes.size(), 2u);
    EXPECT_THROW(witness_search(Z(15), 2, {3, 40, 16, 0}, table(2)), InvalidParameter);
    EXPECT_THROW(witness_search(Z(1), 2, {}, table(2)), InvalidParameter);
    EXPECT_THROW(witness_search(Z(15), 3, {}, table(2)), InvalidParameter);
}

TEST(ResidueTable, KnownRows) {
    const std::map<u64, std::vector<std::pair<std::size_t, u64>>> rows{
        {3, {{9, 7}}},   {5, {{11, 11}}},  {7, {{41, 15}, {187, 43}}}, {11, {{43, 34}}},
        {13, {{33, 14}}}, {17, {{13, 69}, {157, 86}}}, {19, {{19, 210}}}, {23, {{79, 277}, {187, 254}}},
        {29, {{35, 117}}}, {31, {{29, 156}}}, {37, {{21, 408}}}};
    for (const auto& [p, expected] : rows) {
        const auto found = residue_table(p, 200, table(2));
        for (const auto& [t, residue] : expected) {
            const auto it = std::find_if(found.begin(), found.end(),
                                         [&](const TableRow& r) { return r.t == t && r.residue == residue; });
            ASSERT_NE(it, found.end()) << "p=" << p << " t=" << t;
            ASSERT_FALSE(it->classes.empty());
            // any listed class, at its least n0, satisfies all four conditions
            const Integer a(static_cast<unsigned long>(it->classes.front()));
            const auto n0 = minimal_n0(a, 2, p, table(2).primitive(t), 4 * p * p);
            ASSERT_TRUE(n0);
            const auto c = check_conditions(a, 2, Integer(static_cast<unsigned long>(p)), *n0, t, table(2).primitive(t));
            EXPECT_TRUE(c.c1 && c.c3 && c.c4) << "p=" << p << " t=" << t;
        }
    }
    EXPECT_THROW(residue_table(9, 10, table(2)), InvalidParameter);
}

TEST(ResidueTable, SmallestPrimeClasses) {
    const auto rows = residue_table(3, 60, table(2));
    ASSERT_FALSE(rows.empty());
    EXPECT_EQ(rows.front().classes, (std::vector<u64>{2, 4, 5, 7}));
}

TEST(Hensel, LiftsBinaryWitness) {
    const SearchResult r = witness_search(Z(15), 2, {3, 11, 8, 50}, table(2));
    ASSERT_TRUE(r.witness);
    const HenselResult h = hensel_divisibility_demo(*r.witness, 3);
    EXPECT_EQ(h.modulus, 343);
    const Integer x = ipow(Z(15), 1ul << h.n);
    EXPECT_EQ(slow_eval_mod(r.witness->qt, x, h.modulus), 0);
    EXPECT_EQ(mod(x, h.modulus), h.lifted_root);
    EXPECT_THROW(hensel_divisibility_demo(*r.witness, 1), InvalidParameter);
}

// --- properties --------------------------------------------------------------

TEST(PadicProperty, OrderCoherence) {
    gen::Source src(0x0DE5);
    const auto primes = primes_up_to(300);
    for (int i = 0; i < 300; ++i) {
        const u64 p = primes[static_cast<std::size_t>(src.range(0, static_cast<long>(primes.size()) - 1))];
        const Integer a(src.range(2, 100000));
        if (a % p == 0) continue;
        Integer pk(static_cast<unsigned long>(p));
        for (int k = 1; k <= 3; ++k, pk *= p) {
            const Integer lo = mult_order(a, pk), hi = mult_order(a, pk * p);
            EXPECT_TRUE(hi == lo || hi == lo * p) << "a=" << a << " p=" << p << " k=" << k;
        }
    }
}

TEST(PadicProperty, NonzeroFermatQuotientForcesGrowth) {
    gen::Source src(0xFE57);
    const auto primes = primes_up_to(5000);
    int checked = 0;
    while (checked < 500) {
        const u64 p = primes[static_cast<std::size_t>(src.range(1, static_cast<long>(primes.size()) - 1))];
        const Integer a(src.range(2, 1000000));
        if (a % p == 0) continue;
        if (!fermat_quotient_nonzero(a, Integer(static_cast<unsigned long>(p)))) continue;
        EXPECT_TRUE(gamma_growth(a, Integer(static_cast<unsigned long>(p)))) << "a=" << a << " p=" << p;
        ++checked;
    }
}

TEST(PadicProperty, ResidueDivisibilityMatchesBigInteger) {
    for (long a = 2; a <= 20; ++a)
        for (unsigned d : {2u, 3u})
            for (std::uint64_t n0 = 0; n0 <= 4; ++n0) {
                const Integer N = ipow(Z(a), ipow(Z(d), static_cast<unsigned long>(n0)).get_ui()) - 1;
                for (u64 p : primes_up_to(100))
                    EXPECT_EQ(exact_divisibility_of_power(Integer(static_cast<unsigned long>(p)), Z(a), d, n0),
                              exact_divisibility(Integer(static_cast<unsigned long>(p)), N))
                        << a << " " << d << " " << n0 << " " << p;
            }
}

TEST(PadicProperty, SearchIsIndependentOfThreadCount) {
    const auto run = [](const char* threads, const Integer& a, int d) {
        ThreadsEnv env(threads);
        return witness_search(a, d, {3, 40, 16, 200}, table(d));
    };
    for (long a : {2, 3, 5, 6, 10, 15, 21}) {
        for (int d : {2, 3}) {
            const SearchResult serial = run("1", Z(a), d), parallel = run("7", Z(a), d);
            ASSERT_EQ(serial.witness.has_value(), parallel.witness.has_value()) << a;
            if (serial.witness) {
                EXPECT_EQ(serial.witness->p, parallel.witness->p);
                EXPECT_EQ(serial.witness->t, parallel.witness->t);
                EXPECT_EQ(serial.witness->n0, parallel.witness->n0);
                EXPECT_EQ(serial.witness->residue, parallel.witness->residue);
            }
            ASSERT_EQ(serial.primes.size(), parallel.primes.size());
            for (std::size_t i = 0; i < serial.primes.size(); ++i) {
                EXPECT_EQ(serial.primes[i].p, parallel.primes[i].p);
                EXPECT_EQ(serial.primes[i].stage, parallel.primes[i].stage);
            }
        }
    }
}

TEST(PadicProperty, EveryWitnessRevalidates) {
    for (long a = 2; a <= 40; ++a)
        for (int d : {2, 3}) {
            const SearchResult r = witness_search(Z(a), d, {3, 40, 16, d == 2 ? 200u : 40u}, table(d));
            if (!r.witness) continue;
            const ConditionReport c = revalidate(*r.witness);
            EXPECT_TRUE(c.all()) << "a=" << a << " d=" << d;
            EXPECT_EQ(c.residue, r.witness->residue);
            // and against a full big-integer evaluation of q_t
            EXPECT_EQ(slow_eval_mod(r.witness->qt, c.residue, Integer(static_cast<unsigned long>(r.witness->p * r.witness->p))), 0);
        }
}
