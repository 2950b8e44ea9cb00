#include <gtest/gtest.h>

#include "generators.hpp"
#include "mahlercf/contfrac.hpp"

using namespace mahlercf;

namespace {

RatPoly P(std::initializer_list<long> c) { return RatPoly::from_ascending(c); }

const CFExpansion& g_expansion(int d) {
    static std::map<int, CFExpansion> cache;
    auto it = cache.find(d);
    if (it == cache.end()) it = cache.emplace(d, expand_family(d, SeriesKind::G, d <= 3 ? 200 : 20)).first;
    return it->second;
}

}  // namespace

TEST(CfExpand, LeadingSeedsOfG) {
    for (int d = 2; d <= 6; ++d) {
        const CFExpansion cf = expand_family(d, SeriesKind::G, 2);
        EXPECT_TRUE(cf.partial_quotients[0].is_zero());
        EXPECT_EQ(cf.convergents[1].q.monic(), geometric_sum(d)) << "d=" << d;
        EXPECT_EQ(cf.convergents[2].q.monic(), RatPoly::monomial(1, d) + P({1})) << "d=" << d;
    }
}

TEST(CfExpand, BinaryNinthDenominator) {
    const auto n = poly_normalize_integer(g_expansion(2).convergents[9].q);
    EXPECT_EQ(n.primitive.to_rat(), P({1, 1}) * P({2, 0, 1, 0, 0, 0, -1, 0, 1}));
}

TEST(CfExpand, CubicEighthDenominator) {
    const auto n = poly_normalize_integer(g_expansion(3).convergents[8].q);
    EXPECT_EQ(n.primitive, IntPoly({1, 0, 0, 1, 0, 0, 1, 0, 0, 2, 0, 0, 2}));
}

TEST(CfExpand, MatchesEuclidOnDeepRationalApproximant) {
    // r_k / x^{d-1} agrees with g_d far below where the first 12 quotients are decided
    for (int d = 2; d <= 3; ++d) {
        const FiniteProduct r = finite_product(d, 6);
        const RatPoly den = r.denominator * RatPoly::monomial(1, d - 1);
        const CFExpansion euclid = cf_expand_rational(r.numerator, den, 12);
        const CFExpansion series = expand_family(d, SeriesKind::G, 12);
        for (std::size_t i = 0; i <= 12; ++i) EXPECT_EQ(euclid.partial_quotients[i], series.partial_quotients[i]);
    }
}

TEST(CfExpand, InsufficientPrecisionIsReported) {
    EXPECT_THROW(cf_expand(generate_series({2, SeriesKind::G, -6}), 30), InsufficientPrecision);
    EXPECT_THROW(expand_family(2, SeriesKind::G, 30, {-4, -8}), InsufficientPrecision);
    const CFExpansion cf = expand_family(2, SeriesKind::G, 30, {-4, -(1 << 12)});
    EXPECT_EQ(cf.size(), 31u);
    EXPECT_LE(cf.floor_used, -4);
}

TEST(CfExpand, RationalInputTerminates) {
    const CFExpansion cf = cf_expand_rational(P({1, 0, 1}), P({0, 1}));
    EXPECT_TRUE(cf.terminated);
    EXPECT_EQ(cf.partial_quotients, (std::vector<RatPoly>{P({0, 1}), P({0, 1})}));
    EXPECT_THROW(cf_expand_rational(P({1}), RatPoly()), DivisionByZeroPoly);
    // (x^2 + 1)/x has a finite Laurent expansion, so the series route sees exact zero
    const CFExpansion s = cf_expand(LaurentSeries::exact(P({1, 0, 1})).shifted(-1), 10);
    EXPECT_TRUE(s.terminated);
    EXPECT_EQ(s.partial_quotients, cf.partial_quotients);
}

TEST(MonicNormalize, SeedBetasAreZero) {
    const MonicCF m = monic_normalize(g_expansion(3));
    EXPECT_EQ(m.betas[0], 0);
    EXPECT_EQ(m.betas[1], 0);
    EXPECT_EQ(m.betas[2], 2);
    EXPECT_THROW(monic_normalize(cf_expand_rational(P({1}), P({1}))), InvalidParameter);
}

// --- properties --------------------------------------------------------------

TEST(ContfracProperty, DeterminantIsNonzeroConstant) {
    for (int d = 2; d <= 3; ++d) {
        const auto& cv = g_expansion(d).convergents;
        for (std::size_t n = 0; n + 1 < cv.size(); ++n) {
            const RatPoly det = cv[n + 1].p * cv[n].q - cv[n].p * cv[n + 1].q;
            EXPECT_EQ(det.degree(), 0) << "d=" << d << " n=" << n;
        }
    }
}

TEST(ContfracProperty, DegreeBookkeeping) {
    for (int d = 2; d <= 5; ++d) {
        const CFExpansion& cf = g_expansion(d);
        Degree sum = 0;
        for (std::size_t n = 1; n < cf.size(); ++n) {
            sum += cf.partial_quotients[n].degree();
            EXPECT_EQ(cf.convergents[n].q.degree(), sum) << "d=" << d << " n=" << n;
        }
    }
}

TEST(ContfracProperty, RatesMatchNextQuotientDegree) {
    for (int d = 2; d <= 5; ++d)
        for (SeriesKind k : {SeriesKind::F, SeriesKind::G, SeriesKind::H, SeriesKind::U}) {
            const CFExpansion cf = expand_family(d, k, 24);
            const auto rates = convergent_soundness(generate_series({d, k, 2 * cf.floor_used}), cf);
            ASSERT_EQ(rates.size(), 25u);
            for (std::size_t n = 0; n < 24; ++n) EXPECT_EQ(rates[n], cf.partial_quotients[n + 1].degree());
        }
}

TEST(ContfracProperty, RationalInputReconstructs) {
    gen::Source src(0x0A11);
    for (int i = 0; i < 100; ++i) {
        const RatPoly p = src.poly(12, 50, 20), q = src.poly(12, 50, 20);
        const CFExpansion cf = cf_expand_rational(p, q);
        ASSERT_TRUE(cf.terminated);
        const Convergent& last = cf.convergents.back();
        EXPECT_EQ(last.p * q, last.q * p);
        // a truncated series cannot see the final zero remainder; every earlier quotient must agree
        if (cf.size() < 2) continue;
        const CFExpansion s = cf_expand(series_from_rational(p, q, -(4 * 12 + 40)), cf.size() - 2);
        for (std::size_t k = 0; k + 1 < cf.size(); ++k) EXPECT_EQ(s.partial_quotients[k], cf.partial_quotients[k]);
        EXPECT_THROW(cf_expand(series_from_rational(p, q, -(4 * 12 + 40)), cf.size() - 1), InsufficientPrecision);
    }
}

TEST(ContfracProperty, MonicReconstruction) {
    for (int d = 2; d <= 5; ++d) {
        const MonicCF m = monic_normalize(g_expansion(d));
        EXPECT_EQ(monic_reconstruct(m), m.monic_denominators) << "d=" << d;
    }
    gen::Source src(0x3011);
    for (int i = 0; i < 30; ++i) {
        const RatPoly p = src.poly(10, 30, 10), q = src.poly(10, 30, 10);
        const CFExpansion euclid = cf_expand_rational(p, q);
        if (euclid.size() < 4) continue;
        const CFExpansion cf = cf_expand(series_from_rational(p, q, -120), euclid.size() - 2);
        const MonicCF m = monic_normalize(cf);
        EXPECT_EQ(monic_reconstruct(m), m.monic_denominators);
    }
}
