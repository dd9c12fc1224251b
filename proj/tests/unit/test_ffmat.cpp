#include <gtest/gtest.h>

#include <random>

#include "levin/construct.hpp"
#include "levin/ffmat.hpp"

using namespace levin;
using namespace levin::ffmat;

namespace {

// C(n, r) mod p from the additive recurrence, independent of Lucas.
std::vector<std::vector<Residue>> pascal_table(std::size_t n_max, Prime p) {
    std::vector<std::vector<Residue>> t(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
        t[n].assign(n + 1, 1);
        for (std::size_t r = 1; r < n; ++r) t[n][r] = p.add(t[n - 1][r - 1], t[n - 1][r]);
    }
    return t;
}

PascalView random_view(Prime p, std::size_t dim, std::mt19937_64& rng) {
    std::vector<std::uint64_t> eta(dim, 0);
    std::vector<Residue> u(dim);
    std::uniform_int_distribution<Residue> unit(1, p.value() - 1);
    for (std::size_t j = 0; j < dim; ++j) {
        u[j] = unit(rng);
        if (j) eta[j] = eta[j - 1] + (rng() & 1);
    }
    return PascalView(p, ShiftProfile(eta), UnitProfile(u, p));
}

} // namespace

TEST(Prime, RejectsComposites) {
    EXPECT_THROW(Prime(4), std::invalid_argument);
    EXPECT_THROW(Prime(1), std::invalid_argument);
    EXPECT_NO_THROW(Prime(7));
}

TEST(Digits, RoundTripLittleEndian) {
    const Prime p(3);
    const auto d = base_digits(std::uint64_t{5}, p);  // 5 = 2 + 1*3
    ASSERT_EQ(d, (std::vector<Residue>{2, 1}));
    EXPECT_EQ(base_digits(std::uint64_t{5}, p, 4), (std::vector<Residue>{2, 1, 0, 0}));
    EXPECT_THROW(base_digits(std::uint64_t{9}, p, 2), std::out_of_range);
    const BigInt big = big_pow(3, 80) + 12345;
    EXPECT_EQ(from_digits(base_digits(big, p), p), big);
}

TEST(BinomMod, Examples) {
    EXPECT_EQ(binom_mod(5, 2, Prime(3)), 1u);
    EXPECT_EQ(binom_mod(4, 2, Prime(2)), 0u);
    for (std::uint32_t p : {2u, 3u, 5u}) EXPECT_EQ(binom_mod(123, 0, Prime(p)), 1u);
    EXPECT_EQ(binom_mod(3, 5, Prime(5)), 0u);
}

TEST(BinomMod, LastRowOfBlockIsNonzero) {
    for (std::uint32_t pv : {2u, 3u, 5u}) {
        const Prime p(pv);
        for (unsigned m = 1; m <= 3; ++m) {
            const std::uint64_t top = checked_pow(pv, m) - 1;
            for (std::uint64_t j = 0; j <= top; ++j) EXPECT_NE(binom_mod(top, j, p), 0u);
        }
    }
}

TEST(BinomMod, AgreesWithPascalRecurrence) {
    for (std::uint32_t pv : {2u, 3u, 5u, 7u}) {
        const Prime p(pv);
        const auto table = pascal_table(400, p);
        for (std::size_t n = 0; n <= 400; ++n) {
            for (std::size_t r = 0; r <= n; ++r) ASSERT_EQ(binom_mod(n, r, p), table[n][r]) << n << " " << r;
        }
    }
}

TEST(BinomMod, BigAndSmallOverloadsAgree) {
    std::mt19937_64 rng(7);
    for (std::uint32_t pv : {2u, 3u, 7u, 65521u}) {
        const Prime p(pv);
        for (int i = 0; i < 200; ++i) {
            const std::uint64_t n = rng() >> 2;
            const std::uint64_t r = rng() % (n + 1);
            EXPECT_EQ(binom_mod(BigInt(n), BigInt(r), p), binom_mod(n, r, p));
        }
    }
}

TEST(PascalEntry, Examples) {
    const Prime p2(2);
    EXPECT_EQ(pascal_entry(0, 0, ShiftProfile::zero(4), UnitProfile::ones(4, p2), p2), 1u);
    EXPECT_EQ(pascal_entry(1, 1, ShiftProfile::zero(4), UnitProfile::ones(4, p2), p2), 0u);
}

TEST(PascalEntry, UnshiftedSatisfiesAdditiveRecurrence) {
    const Prime p(3);
    const auto view = PascalView::unshifted(p, 3);
    for (std::size_t i = 0; i < view.dim(); ++i) {
        EXPECT_EQ(view.entry(i, 0), 1u);
        EXPECT_EQ(view.entry(0, i), 1u);
    }
    for (std::size_t i = 1; i < view.dim(); ++i) {
        for (std::size_t j = 1; j < view.dim(); ++j) {
            ASSERT_EQ(view.entry(i, j), p.add(view.entry(i - 1, j), view.entry(i, j - 1)));
        }
    }
}

TEST(PascalEntry, LucasSelfSimilarity) {
    for (std::uint32_t pv : {2u, 3u, 5u}) {
        const Prime p(pv);
        const std::size_t n = std::size_t{pv} * pv;
        const auto eta = ShiftProfile::zero(n * pv);
        const auto u = UnitProfile::ones(n * pv, p);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                EXPECT_EQ(pascal_entry(pv * i, pv * j, eta, u, p), pascal_entry(i, j, eta, u, p));
            }
        }
    }
}

TEST(PascalView, ShiftAndScaleDefinition) {
    std::mt19937_64 rng(11);
    const Prime p(5);
    const auto view = random_view(p, 25, rng);
    for (std::size_t i = 0; i < 25; ++i) {
        for (std::size_t j = 0; j < 25; ++j) {
            const Residue c = binom_mod(i + j - view.eta(j), j, p);
            EXPECT_EQ(view.entry(i, j), p.mul(c, view.unit(j)));
        }
    }
}

TEST(PascalView, RepeatedCallsAgree) {
    std::mt19937_64 rng(3);
    const auto view = random_view(Prime(3), 27, rng);
    const auto first = view.materialize();
    EXPECT_EQ(view.materialize(), first);
    EXPECT_EQ(view.row(5), view.row(5));
}

TEST(Submatrices, FullWindowIsWholeMatrix) {
    const auto view = PascalView::unshifted(Prime(2), 3);
    EXPECT_EQ(submatrix_A(view, 0, view.dim()), view.materialize());
}

TEST(Submatrices, NamedLayoutAtDim27) {
    const auto view = PascalView::unshifted(Prime(3), 3);
    const std::size_t k = 11, t = 7;
    const auto A = submatrix_A(view, k, t);
    const auto B = submatrix_B(view, k, t);
    ASSERT_EQ(A.rows, t);
    ASSERT_EQ(A.cols, t);
    ASSERT_EQ(B.rows, t);
    ASSERT_EQ(B.cols, 27 - t);
    for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = 0; j < t; ++j) EXPECT_EQ(A.at(i, j), view.entry(k + i, j));
        for (std::size_t j = 0; j < 27 - t; ++j) EXPECT_EQ(B.at(i, j), view.entry(k + i, t + j));
    }
    const auto c = row_c(view, k + t, t);
    const auto d = row_d(view, k + t, t);
    ASSERT_EQ(c.size(), t);
    ASSERT_EQ(d.size(), 27 - t);
    for (std::size_t j = 0; j < t; ++j) EXPECT_EQ(c[j], view.entry(k + t, j));
    for (std::size_t j = 0; j < 27 - t; ++j) EXPECT_EQ(d[j], view.entry(k + t, t + j));
}

TEST(Elimination, Basics) {
    const Prime p(2);
    EXPECT_TRUE(is_regular(ResidueMatrix::identity(5), p));
    ResidueMatrix ones(2, 2);
    ones.data = {1, 1, 1, 1};
    EXPECT_FALSE(is_regular(ones, p));
    EXPECT_EQ(rank(ones, p), 1u);
    EXPECT_EQ(determinant(ResidueMatrix::identity(4), Prime(7)), 1u);
    EXPECT_FALSE(solve(ones, {1, 0}, p).has_value());
}

TEST(Elimination, SolveRoundTrip) {
    std::mt19937_64 rng(5);
    const Prime p(5);
    for (int trial = 0; trial < 50; ++trial) {
        ResidueMatrix a(6, 6);
        for (auto& v : a.data) v = rng() % 5;
        std::vector<Residue> b(6);
        for (auto& v : b) v = rng() % 5;
        const auto x = solve(a, b, p);
        EXPECT_EQ(x.has_value(), is_regular(a, p));
        EXPECT_EQ(x.has_value(), determinant(a, p) != 0);
        if (x) EXPECT_EQ(multiply(a, *x, p), b);
    }
}

TEST(Regularity, FirstColumnWindowsOfRandomViews) {
    std::mt19937_64 rng(17);
    for (std::uint32_t pv : {2u, 3u}) {
        const Prime p(pv);
        for (unsigned m = 1; m <= 2; ++m) {
            const std::size_t dim = checked_pow(pv, m);
            for (int q = 0; q < 10; ++q) {
                const auto view = random_view(p, dim, rng);
                for (std::size_t t = 1; t <= dim; ++t) {
                    for (std::size_t l = 0; l + t <= dim; ++l) {
                        EXPECT_TRUE(is_regular(window(view, l, t, 0, t), p));
                        EXPECT_TRUE(is_regular(window(view, view.eta(l), t, l, t), p));
                    }
                }
            }
        }
    }
}

TEST(Regularity, UnshiftedAntiDiagonal) {
    for (std::uint32_t pv : {2u, 3u}) {
        for (unsigned m = 1; m <= 3; ++m) {
            const auto view = PascalView::unshifted(Prime(pv), m);
            const std::size_t dim = view.dim();
            for (std::size_t i = 0; i < dim; ++i) {
                for (std::size_t j = 0; j < dim; ++j) {
                    if (i + j == dim - 1) EXPECT_NE(view.entry(i, j), 0u);
                    if (i + j >= dim) EXPECT_EQ(view.entry(i, j), 0u);
                }
            }
        }
    }
}

TEST(Xi, Examples) {
    EXPECT_EQ(xi(1, Prime(2)), (std::vector<Residue>{1}));
    EXPECT_EQ(xi(1, Prime(7)), (std::vector<Residue>{1}));
    EXPECT_EQ(xi(2, Prime(3)), (std::vector<Residue>{2, 2}));
    EXPECT_EQ(xi(3, Prime(2)), (std::vector<Residue>{1, 1, 1}));
}

TEST(HockeyStick, Examples) {
    EXPECT_EQ(hockey_stick_sum(4, 0, Prime(3)), 0u);
    EXPECT_EQ(hockey_stick(4, 0, Prime(3)), 0u);
    EXPECT_EQ(hockey_stick_sum(1, 2, Prime(5)), 0u);
    EXPECT_EQ(hockey_stick(1, 2, Prime(5)), 0u);
    for (std::uint64_t u = 0; u < 20; ++u) EXPECT_EQ(hockey_stick(0, u, Prime(7)), u % 7);
}

TEST(HockeyStick, ClosedFormMatchesSum) {
    for (std::uint32_t pv : {2u, 3u, 5u}) {
        for (std::uint64_t i = 0; i < 40; ++i) {
            for (std::uint64_t u = 0; u < 40; ++u) {
                EXPECT_EQ(hockey_stick_sum(i, u, Prime(pv)), hockey_stick(i, u, Prime(pv)));
            }
        }
    }
}

TEST(RowPrediction, LastWindow) {
    const auto view = PascalView::unshifted(Prime(3), 2);
    const std::size_t t = view.dim() - 1;
    EXPECT_EQ(predict_c_row(view, 0, t), row_c(view, t, t));
    EXPECT_EQ(predict_d_row(view, 0, t), row_d(view, t, t));
}

TEST(RowPrediction, ExhaustiveUnshiftedP2M2) {
    const auto view = PascalView::unshifted(Prime(2), 2);
    for (std::size_t t = 1; t < view.dim(); ++t) {
        for (std::size_t k = 0; k + t < view.dim(); ++k) {
            EXPECT_EQ(predict_c_row(view, k, t), row_c(view, k + t, t));
            EXPECT_EQ(predict_d_row(view, k, t), row_d(view, k + t, t));
        }
    }
}

TEST(RowPrediction, RandomProfilesP3M1) {
    std::mt19937_64 rng(23);
    for (int q = 0; q < 50; ++q) {
        const auto view = random_view(Prime(3), 3, rng);
        for (std::size_t t = 1; t < 3; ++t) {
            for (std::size_t k = 0; k + t < 3; ++k) {
                EXPECT_EQ(predict_c_row(view, k, t), row_c(view, k + t, t));
                EXPECT_EQ(predict_d_row(view, k, t), row_d(view, k + t, t));
            }
        }
    }
}

TEST(RowPrediction, RandomProfilesP2M3) {
    std::mt19937_64 rng(29);
    for (int q = 0; q < 20; ++q) {
        const auto view = random_view(Prime(2), 8, rng);
        for (std::size_t t = 1; t < 8; ++t) {
            for (std::size_t k = 0; k + t < 8; ++k) {
                EXPECT_EQ(predict_c_row(view, k, t), row_c(view, k + t, t));
                EXPECT_EQ(predict_d_row(view, k, t), row_d(view, k + t, t));
            }
        }
    }
}

TEST(Dm, WindowShapeAndEntries) {
    EXPECT_THROW(dm_window(7, Prime(2)), std::domain_error);
    const auto w = dm_window(8, Prime(2));
    EXPECT_EQ(w.rows(), 28u);
    EXPECT_EQ(w.cols, 2u);
    EXPECT_EQ(w.row_end, 32u);
    const Prime p(3);
    for (std::uint64_t i = 0; i < 30; ++i) {
        for (std::uint64_t j = 0; j < 30; ++j) EXPECT_EQ(dm_entry(i, j, p), p.sub(binom_mod(i + 1 + j, j, p), 1));
    }
    const auto mat = dm_matrix(8, Prime(2));
    EXPECT_EQ(mat.rows, 28u);
    EXPECT_EQ(mat.at(0, 1), dm_entry(w.row_begin, 1, Prime(2)));
}

TEST(Dm, CountsMatchClosedForm) {
    const Prime p2(2);
    const auto w8 = dm_window(8, p2);
    std::uint64_t total = 0;
    for (auto c : dm_column_counts(w8, p2, 1)) total += c;
    EXPECT_EQ(total, 14u);
    EXPECT_EQ(dm_predicted_fraction(8, p2), Rational(1, 4));

    const auto w9 = dm_window(9, p2);
    total = 0;
    for (auto c : dm_column_counts(w9, p2, 1)) total += c;
    EXPECT_EQ(Rational(total), (1 - Rational(9, 16)) * Rational(w9.rows() * w9.cols));

    const Prime p3(3);
    const auto w = dm_window(8, p3);
    EXPECT_EQ(w.rows(), 234u);
    EXPECT_EQ(w.cols, 3u);
    total = 0;
    for (auto c : dm_column_counts(w, p3, 2)) total += c;
    EXPECT_EQ(Rational(total), (1 - Rational(4, 6)) * Rational(234 * 3));
}

TEST(Dm, OverrideWindow) {
    const DmWindow small{2, 5, 3};
    const auto mat = dm_matrix(3, Prime(2), small);
    ASSERT_EQ(mat.rows, 3u);
    for (std::uint64_t i = 0; i < 3; ++i) {
        for (std::uint64_t j = 0; j < 3; ++j) EXPECT_EQ(mat.at(i, j), dm_entry(2 + i, j, Prime(2)));
    }
}

TEST(PascalCount, PowersOfTriangularNumber) {
    for (std::uint32_t pv : {2u, 3u, 5u}) {
        const std::uint64_t tri = std::uint64_t{pv} * (pv + 1) / 2;
        for (unsigned r = 0; r <= (pv == 5 ? 4u : 5u); ++r) EXPECT_EQ(pascal_nonzero_count(r, Prime(pv)), checked_pow(tri, r));
    }
}
