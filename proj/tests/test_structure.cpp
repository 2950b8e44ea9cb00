#include <gtest/gtest.h>

#include <set>

#include "generators.hpp"
#include "mahlercf/structure.hpp"

using namespace mahlercf;

namespace {

const CFExpansion& g3_expansion() {
    static const CFExpansion cf = expand_family(3, SeriesKind::G, 6 * 30 + 6);
    return cf;
}

const BetaSequence& g3_betas() {
    static const BetaSequence s = extract_betas(3, g3_expansion());
    return s;
}

// Degrees of every partial quotient a_1..a_n for (num/den) * g_d, regenerating as needed
std::vector<Degree> quotient_degrees(int d, const RatPoly& num, const RatPoly& den, Degree min_q_degree) {
    for (std::size_t n = 16;; n *= 2) {
        const CFExpansion cf = with_refloor(-(8 * min_q_degree + 64), -(1 << 20), [&](Degree floor) {
            const auto g = generate_series({d, SeriesKind::G, floor});
            return cf_expand(series_divide(num * g, LaurentSeries::exact(den)), n);
        });
        if (cf.terminated || cf.convergents.back().q.degree() > min_q_degree) {
            std::vector<Degree> out;
            for (std::size_t i = 1; i < cf.partial_quotients.size(); ++i) {
                out.push_back(cf.partial_quotients[i].degree());
                if (cf.convergents[i].q.degree() > min_q_degree) break;
            }
            return out;
        }
    }
}

}  // namespace

TEST(BetaSequence, CubicSeeds) {
    const auto& b = g3_betas().betas;
    EXPECT_EQ(b[0], 0);
    EXPECT_EQ(b[1], 0);
    EXPECT_EQ(b[2], 2);
}

TEST(BetaSequence, BinaryClosedFormSeeds) {
    const auto b = binary_beta_recurrence(8);
    EXPECT_EQ(b[2], 2);
    EXPECT_EQ(b[3], -1);
    EXPECT_EQ(b[4], 1);
    EXPECT_THROW(binary_beta_recurrence(3), InvalidParameter);
    const auto oracle = beta_sequence(2, 8).betas;
    for (std::size_t i = 2; i <= 8; ++i) EXPECT_EQ(b[i], oracle[i]) << i;
}

TEST(BetaSequence, ShapeViolationForLargeD) {
    for (int d : {4, 5}) {
        try {
            beta_sequence(d, 20);
            ADD_FAILURE() << "d=" << d << " produced a full two-term recurrence";
        } catch (const ShapeViolation& e) {
            EXPECT_GE(e.index(), 2u);
        }
    }
}

TEST(Identities, CubicIdentitiesToThirty) {
    for (Identity id : {Identity::CubeSubstitution, Identity::BetaProduct, Identity::BetaSum, Identity::BetaPairSum,
                        Identity::CoefficientRelations}) {
        const IdentityReport r = check_beta_identity(id, g3_betas(), g3_expansion(), 0, 30);
        EXPECT_TRUE(r.passed()) << to_string(id) << " fails at k=" << (r.failures.empty() ? -1 : r.failures.front());
    }
}

TEST(Identities, CubicOnlyIdentitiesRejectOtherD) {
    EXPECT_THROW(verify_identity(Identity::BetaSum, 2, 0, 3), InvalidParameter);
    EXPECT_THROW(check_beta_identity(Identity::BetaSum, g3_betas(), g3_expansion(), 0, 31), InvalidParameter);
}

TEST(Identities, NamesRoundTrip) {
    for (Identity id : {Identity::FunctionalEquation, Identity::CubeSubstitution, Identity::BetaProduct,
                        Identity::BetaSum, Identity::BetaPairSum, Identity::CoefficientRelations,
                        Identity::Classification, Identity::BinaryRecurrence})
        EXPECT_EQ(parse_identity(to_string(id)), id);
    EXPECT_FALSE(parse_identity("nonsense"));
}

TEST(Identities, FunctionalEquationReport) {
    EXPECT_TRUE(verify_identity(Identity::FunctionalEquation, 4, -200, 0).passed());
}

TEST(Transport, HAndUConvergentsLandOnG) {
    for (int d : {2, 3}) {
        const auto g = generate_series({d, SeriesKind::G, -3000});
        for (SeriesKind kind : {SeriesKind::H, SeriesKind::U}) {
            const CFExpansion cf = expand_family(d, kind, 20);
            for (const Convergent& c : cf.convergents) {
                if (!c.rate) continue;
                const auto t = transport(d, kind == SeriesKind::H ? Origin::H : Origin::U, c, g);
                EXPECT_GE(t.measured_rate, t.claimed_rate_lower_bound);
            }
        }
    }
}

TEST(Transport, ExchangeLosesAtMostOne) {
    for (int d : {2, 3}) {
        const CFExpansion u = expand_family(d, SeriesKind::U, 16);
        const CFExpansion h = expand_family(d, SeriesKind::H, 16);
        for (std::size_t i = 0; i + 1 < u.size(); ++i) {
            EXPECT_NO_THROW(exchange_x_minus_one(d, Exchange::UToH, u.convergents[i].p, u.convergents[i].q,
                                                 *u.convergents[i].rate, -2000));
            EXPECT_NO_THROW(exchange_x_minus_one(d, Exchange::HToU, h.convergents[i].p, h.convergents[i].q,
                                                 *h.convergents[i].rate, -2000));
        }
    }
}

TEST(WellApprox, RatesOfFiniteProducts) {
    const WellApproxReport r4 = wellapprox_witness(4, 3);
    std::vector<Degree> rates;
    for (const auto& e : r4.entries) rates.push_back(e.rate);
    EXPECT_EQ(rates, (std::vector<Degree>{2, 6, 22, 86}));
    EXPECT_TRUE(r4.strictly_increasing);
    ASSERT_TRUE(r4.first_large_index);
    EXPECT_GE(r4.first_large_degree, 4);

    const WellApproxReport r5 = wellapprox_witness(5, 3);
    for (const auto& e : r5.entries) EXPECT_EQ(e.rate, e.expected);
    EXPECT_EQ(r5.entries.back().rate, 313);
    EXPECT_THROW(wellapprox_witness(3, 2), InvalidParameter);
}

// --- properties --------------------------------------------------------------

TEST(StructureProperty, ClassificationTotalToTwoHundred) {
    for (int d : {2, 3}) {
        const IdentityReport r = check_classification(d, 0, 200);
        EXPECT_TRUE(r.passed()) << "d=" << d << " first failure m=" << (r.failures.empty() ? -1 : r.failures.front());
    }
}

TEST(StructureProperty, MonicQuotientShape) {
    for (int d : {2, 3}) {
        const MonicCF m = monic_normalize(expand_family(d, SeriesKind::G, 200));
        for (std::size_t n = 1; n < m.monic_quotients.size(); ++n)
            EXPECT_EQ(m.monic_quotients[n], n % 2 == 1 ? geometric_sum(d) : x_minus_one()) << "d=" << d << " n=" << n;
    }
}

TEST(StructureProperty, RecurrenceEqualsExpansion) {
    for (int d : {2, 3}) {
        const BetaSequence s = beta_sequence(d, 200);
        EXPECT_EQ(monic_recurrence(d, s.betas, 200), s.monic_denominators) << "d=" << d;
    }
}

TEST(StructureProperty, BinaryRecurrenceEqualsOracle) { EXPECT_TRUE(check_binary_recurrence(200).passed()); }

TEST(StructureProperty, CubicDegreePartition) {
    const MonicCF m = monic_normalize(expand_family(3, SeriesKind::G, 200));
    std::set<Degree> seen;
    for (const auto& q : m.monic_denominators) seen.insert(q.degree());
    const Degree top = m.monic_denominators.back().degree();
    std::set<Degree> expected;
    for (Degree k = 0; k <= top; ++k)
        if (k % 3 != 1) expected.insert(k);
    EXPECT_EQ(seen, expected);
}

TEST(StructureProperty, LinearQuotientsOfHAndU) {
    for (int d : {2, 3})
        for (SeriesKind k : {SeriesKind::H, SeriesKind::U}) {
            const CFExpansion cf = expand_family(d, k, 200);
            for (std::size_t n = 1; n < cf.partial_quotients.size(); ++n)
                EXPECT_EQ(cf.partial_quotients[n].degree(), 1) << "d=" << d << " kind=" << to_string(k) << " n=" << n;
        }
}

// Scaling by a rational function a/b moves every rate by at most s = deg a + deg b.
// A quotient of degree >= d + s in (a/b) g_d can only come from one of degree >= d
// in g_d, and one of degree >= d + 2s in g_d always leaves one of degree >= d + s.
TEST(StructureProperty, RationalMultipleKeepsTheLargeQuotientTrigger) {
    gen::Source src(0x4A7E);
    for (int d = 2; d <= 5; ++d) {
        const CFExpansion g = expand_family(d, SeriesKind::G, 40);
        Degree window = 0, g_max = 0;
        for (std::size_t i = 1; i < g.size(); ++i) {
            if (g.convergents[i - 1].q.degree() > 40) break;
            window = g.convergents[i - 1].q.degree();
            g_max = std::max(g_max, g.partial_quotients[i].degree());
        }
        for (int trial = 0; trial < 12; ++trial) {
            const RatPoly num = src.poly(3, 9, 1), den = src.poly(3, 9, 1);
            const Degree slack = num.degree() + den.degree();
            const auto degs = quotient_degrees(d, num, den, window + den.degree());
            const Degree w_max = *std::max_element(degs.begin(), degs.end());
            const bool g_large = g_max >= d + 2 * slack;
            const bool w_large = w_max >= d + slack;
            EXPECT_EQ(g_large, w_large) << "d=" << d << " trial=" << trial << " g_max=" << g_max << " w_max=" << w_max;
            if (d <= 3) EXPECT_LE(w_max, d - 1 + slack);
            else EXPECT_GE(w_max, g_max - slack);
        }
    }
}
