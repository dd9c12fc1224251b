#include <gtest/gtest.h>

#include <random>

#include "levin/discrepancy.hpp"
#include "levin/lowerbound.hpp"

using namespace levin;
using namespace levin::lowerbound;
using ffmat::Prime;

namespace {

// Cell counts from single-digit random access, no rolling codes.
std::vector<std::uint64_t> direct_counts(const construct::DigitStream& s, unsigned m, std::size_t t, std::uint64_t B) {
    const std::uint64_t p = s.prime().value();
    const std::uint64_t dim = checked_pow(p, m);
    const BigInt base = s.offset(m);
    std::vector<std::uint64_t> counts(checked_pow(p, t), 0);
    const std::uint64_t width = checked_pow(p, t);
    for (std::uint64_t n = B * width; n < (B + 1) * width; ++n) {
        for (std::uint64_t k = 0; k < dim; ++k) {
            std::uint64_t c = 0;
            for (std::size_t i = 0; i < t; ++i) c = c * p + s.digit(base + dim * n + k + i);
            ++counts[c];
        }
    }
    return counts;
}

std::vector<Residue> random_digits(std::size_t w, Prime p, std::mt19937_64& rng) {
    std::vector<Residue> d(w);
    for (auto& x : d) x = static_cast<Residue>(rng() % p.value());
    return d;
}

} // namespace

TEST(Plan, PaperSchedule) {
    const auto p8 = make_plan(8, Prime(2));
    EXPECT_EQ(p8.w, (std::vector<std::uint64_t>{31, 23}));
    EXPECT_EQ(p8.M(), 1u);
    EXPECT_TRUE(p8.standard_schedule);
    EXPECT_EQ(p8.B, (std::vector<BigInt>{0, big_pow(2, 31)}));
    EXPECT_EQ(p8.N, construct::n_offset(8, Prime(2)) + BigInt(256) * (big_pow(2, 31) + big_pow(2, 23)));
    EXPECT_EQ(make_plan(9, Prime(2)).w, (std::vector<std::uint64_t>{63, 55, 47, 39}));
    for (auto w : make_plan(9, Prime(3)).w) EXPECT_EQ(w % 3, 2u);
    EXPECT_THROW(make_plan(7, Prime(2)), std::domain_error);
}

TEST(Plan, CustomValidation) {
    const auto plan = make_custom_plan(Prime(2), 3, {3});
    EXPECT_EQ(plan.blocks(), 1u);
    EXPECT_EQ(plan.N, 72 + 8 * 8);
    EXPECT_FALSE(plan.standard_schedule);
    EXPECT_THROW(make_custom_plan(Prime(2), 3, {}), std::invalid_argument);
    EXPECT_THROW(make_custom_plan(Prime(2), 3, {4}), std::invalid_argument);
    EXPECT_THROW(make_custom_plan(Prime(2), 3, {3, 5}), std::invalid_argument);
    EXPECT_THROW(make_custom_plan(Prime(2), 3, {9}), std::invalid_argument);
    EXPECT_THROW(make_custom_plan(Prime(3), 2, {5, 5}), std::invalid_argument);
}

TEST(Exceptional, MatchesDirectCounting) {
    const construct::DigitStream s2(Prime(2), 3);
    EXPECT_TRUE(exceptional_cs(s2, 2, 1, 0).empty());
    const auto counts = cell_counts(s2, 2, 3, 0);
    EXPECT_EQ(counts, direct_counts(s2, 2, 3, 0));
    EXPECT_LE(exceptional_cs(s2, 2, 3, 0).size(), 4u);

    const construct::DigitStream s3(Prime(3), 2);
    for (std::uint64_t B = 0; B < 3; ++B) {
        EXPECT_EQ(cell_counts(s3, 1, 2, B), direct_counts(s3, 1, 2, B));
        const auto exc = exceptional_cs(s3, 1, 2, B);
        EXPECT_LE(exc.size(), 2u);
        for (std::uint64_t c = 0; c < 9; ++c) {
            const bool listed = std::find(exc.begin(), exc.end(), c) != exc.end();
            EXPECT_EQ(listed, cell_counts(s3, 1, 2, B)[c] != 3);
        }
    }
    EXPECT_THROW(cell_counts(s2, 2, 0, 0), std::invalid_argument);
    EXPECT_THROW(cell_counts(s2, 2, 2, 4), std::invalid_argument);
    EXPECT_THROW(cell_counts(s2, 2, 3, 0, 4), BudgetExceeded);
}

TEST(Exceptional, BoundOnRandomStreams) {
    const Prime p(2);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const construct::DigitStream s(p, 4, construct::random_source(p, seed));
        for (std::size_t t = 1; t <= 8; ++t) {
            for (std::uint64_t B = 0; B < checked_pow(2, 8 - t); ++B) {
                EXPECT_LE(exceptional_cs(s, 3, t, B).size(), 2 * (t - 1));
            }
        }
    }
}

TEST(BlockVector, OnesAtScheduleGaps) {
    const auto plan = make_custom_plan(Prime(2), 4, {7, 5, 3});
    EXPECT_EQ(block_vector(plan, 0), std::vector<Residue>(9, 0));
    auto v2 = block_vector(plan, 2);
    ASSERT_EQ(v2.size(), 13u);
    std::vector<Residue> expected(13, 0);
    expected[2] = expected[4] = 1;
    EXPECT_EQ(v2, expected);
    EXPECT_EQ(u_digits(6, 4, Prime(2)), (std::vector<Residue>{0, 1, 1, 0}));
}

TEST(Gamma, FirstBlockIsXiTermOnly) {
    const Prime p(2);
    const auto plan = make_custom_plan(p, 4, {7, 5});
    const auto params = construct::levin_params(4, p);
    std::mt19937_64 rng(3);
    for (std::size_t k = 0; k + 7 < 16; ++k) {
        const auto U = random_digits(7, p, rng);
        EXPECT_EQ(predict_gamma(params, plan, 0, k, U), ffmat::dot(ffmat::xi(7, p), U, p));
        EXPECT_EQ(predict_gamma_levin(plan, 0, k, U), ffmat::dot(ffmat::xi(7, p), U, p));
    }
}

TEST(Gamma, MatrixPathAgreesWithClosedFormAtPaperScale) {
    const Prime p(2);
    const auto plan = make_plan(8, p);
    const auto params = construct::levin_params(8, p);
    std::mt19937_64 rng(5);
    for (std::size_t l = 0; l < 2; ++l) {
        const std::size_t w = plan.w[l];
        for (std::size_t k = 0; k + w < 256; ++k) {
            auto U = random_digits(w, p, rng);
            const Residue g = predict_gamma(params, plan, l, k, U);
            EXPECT_EQ(g, predict_gamma_levin(plan, l, k, U)) << l << " " << k;
            U.back() = 0;  // least significant digit != p-1
            auto U1 = U;
            U1.back() = 1;
            EXPECT_EQ(predict_gamma(params, plan, l, k, U1), p.add(predict_gamma(params, plan, l, k, U), 1));
        }
    }
}

TEST(Gamma, ClosedFormRejectsIrregularGaps) {
    const auto plan = make_custom_plan(Prime(2), 4, {11, 9, 3});
    std::vector<Residue> U(3, 0);
    EXPECT_THROW(predict_gamma_levin(plan, 2, 0, U), std::domain_error);
}

TEST(Solve, HomogeneousAndSubstitution) {
    const Prime p(3);
    const auto params = construct::levin_params(2, p);
    const std::vector<Residue> zeros(5, 0);
    EXPECT_EQ(solve_unique_n(params, 1, std::vector<Residue>(4, 0), zeros), std::vector<Residue>(4, 0));

    std::mt19937_64 rng(8);
    const auto plan = make_custom_plan(p, 2, {5, 2});
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t l = trial % 2;
        const std::size_t w = plan.w[l];
        const std::size_t k = rng() % (9 - w);
        const auto U = random_digits(w, p, rng);
        const auto v = block_vector(plan, l);
        const auto e = solve_unique_n(params, k, U, v);
        EXPECT_EQ(gamma_from_solution(params, k, e, v), predict_gamma(params, plan, l, k, U));
    }
}

TEST(Gamma, DeskPlansAgainstEnumeration) {
    struct Desk {
        std::uint32_t p;
        unsigned m;
        std::vector<std::uint64_t> w;
    };
    for (const auto& d : {Desk{2, 3, {3}}, Desk{2, 3, {5}}, Desk{2, 3, {7, 5}}, Desk{3, 1, {2}}, Desk{2, 4, {7, 5, 3}},
                          Desk{3, 2, {8, 5, 2}}}) {
        const Prime p(d.p);
        const auto plan = make_custom_plan(p, d.m, d.w);
        const construct::DigitStream s(p, d.m + 1);
        const auto check = verify_gamma(plan, s);
        EXPECT_TRUE(check.ok()) << d.p << " " << d.m;
        EXPECT_GT(check.pairs, 0u);
        EXPECT_GT(check.shift_checked, 0u);
    }
}

TEST(Gamma, EnumerationSeesEveryCellOnce) {
    const Prime p(2);
    const auto plan = make_custom_plan(p, 3, {3});
    const construct::DigitStream s(p, 4);
    for (std::size_t k = 0; k + 3 < 8; ++k) {
        const auto hits = enumerate_hits(s, plan, 0, k);
        ASSERT_EQ(hits.size(), 8u);
        std::vector<int> seen(8, 0);
        for (const auto& h : hits) ++seen[h.U];
        EXPECT_EQ(seen, std::vector<int>(8, 1));
    }
}

TEST(Chain, InvariantsAndSurplus) {
    struct Desk {
        std::uint32_t p;
        unsigned m;
        std::vector<std::uint64_t> w;
        bool positive;
    };
    for (const auto& d : {Desk{2, 3, {3}, true}, Desk{2, 3, {5}, true}, Desk{3, 1, {2}, false},
                          Desk{2, 4, {11, 9, 7}, true}, Desk{3, 2, {8, 5}, true}}) {
        const Prime p(d.p);
        const auto plan = make_custom_plan(p, d.m, d.w);
        const construct::DigitStream s(p, d.m + 1);
        const auto chain = build_chain(plan, s);
        ASSERT_EQ(chain.levels.size(), plan.blocks());

        Rational width_cap = 0;
        for (std::size_t l = 0; l < chain.levels.size(); ++l) {
            const auto& lv = chain.levels[l];
            EXPECT_NE(lv.U % d.p, BigInt(d.p - 1));
            const Rational span = lv.V - Rational(lv.U);
            EXPECT_EQ(span, lv.wide ? Rational(2 * d.p - 1, d.p) : Rational(d.p - 1, d.p));
            EXPECT_EQ(lv.wide, lv.gamma == d.p - 1);
            if (l > 0) EXPECT_EQ(chain.right(l), chain.left(l - 1));
            width_cap += Rational(2) / Rational(big_pow(d.p, plan.w[l]));
        }
        EXPECT_LE(chain.length(), width_cap);
        EXPECT_LE(chain.length(), Rational(4) / Rational(big_pow(d.p, plan.w.back())));
        EXPECT_GE(chain.lower(), 0);
        EXPECT_LE(chain.upper(), 1);

        const auto report = count_surplus(plan, chain, s);
        EXPECT_EQ(report.lambda, chain.length());
        for (const auto& b : report.blocks) EXPECT_TRUE(b.claim_holds);

        // independent count over exact points
        const auto N = plan.N.convert_to<std::uint64_t>();
        const auto ps = discrepancy::extract_points(s, 0, N, static_cast<unsigned>(plan.w.front() + 2));
        std::uint64_t inside = 0;
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const Rational x = ps.point(i);
            inside += x >= chain.lower() && x < chain.upper();
        }
        EXPECT_EQ(report.delta, Rational(inside) - Rational(N) * chain.length());
        if (d.positive) EXPECT_GT(report.delta, 0);
    }
}

TEST(Chain, SingleBlockWidth) {
    const Prime p(2);
    const auto plan = make_custom_plan(p, 3, {3});
    const construct::DigitStream s(p, 4);
    const auto chain = build_chain(plan, s);
    EXPECT_EQ(chain.levels[0].U, 0);
    EXPECT_EQ(chain.length(), Rational(1, 16));
    EXPECT_EQ(count_surplus(plan, chain, s).delta, Rational(3, 2));
}

TEST(Chain, ReportsMissingZone) {
    const Prime p(2);
    const auto plan = make_custom_plan(p, 3, {5, 3});
    const construct::DigitStream s(p, 4);
    EXPECT_THROW(build_chain(plan, s), std::runtime_error);
}

TEST(ALBound, EightLevelCounts) {
    const auto al = a_l_lower_bound(8, Prime(2));
    EXPECT_EQ(al.total, 112u);
    EXPECT_EQ(al.target, 434);
    EXPECT_FALSE(al.regime);
    EXPECT_FALSE(al.holds);
    EXPECT_THROW(a_l_lower_bound(7, Prime(2)), std::domain_error);
}

TEST(FinalConstant, PositiveForSmallPrimes) {
    for (std::uint32_t pv : {2u, 3u, 5u, 7u}) {
        const Rational p3(std::int64_t(pv) * pv * pv), p5 = Rational(std::int64_t(pv) * pv) * p3;
        const Rational expected = (p3 - 1) / p3 * ((p5 - 1) / p5) - Rational(pv - 1, pv) -
                                  Rational(2 * pv - 1) / (Rational(pv - 1) * Rational(big_pow(pv, pv * pv * pv)));
        EXPECT_EQ(final_constant(Prime(pv)), expected);
        EXPECT_GT(final_constant(Prime(pv)), 0);
    }
}
