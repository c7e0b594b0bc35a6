#include "loopair/matrix.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace loopair;

TEST(Schur, IdentityMask) {
    const Matrix a{{1, 2}, {3, 4}};
    const Matrix ones{{1, 1}, {1, 1}};
    const Matrix p = schur(a, ones);
    EXPECT_EQ(p(0, 0), 1);
    EXPECT_EQ(p(0, 1), 2);
    EXPECT_EQ(p(1, 0), 3);
    EXPECT_EQ(p(1, 1), 4);
}

TEST(Schur, ZeroPattern) {
    const Matrix p = schur(Matrix{{2, 0}}, Matrix{{0, 5}});
    EXPECT_EQ(p(0, 0), 0);
    EXPECT_EQ(p(0, 1), 0);
}

TEST(Schur, DimensionMismatch) {
    EXPECT_THROW(schur(Matrix{{1, 2}}, Matrix{{1}, {2}}), ValidationError);
}

TEST(Solve, Diagonal) {
    const Matrix x = solve(Matrix{{2, 0}, {0, 4}}, Matrix{{2}, {4}});
    EXPECT_DOUBLE_EQ(x(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(x(1, 0), 1.0);
}

TEST(Solve, IdentityReturnsRhs) {
    const Matrix rhs{{3, -1}, {2, 7}};
    const Matrix x = solve(Matrix::identity(2), rhs);
    EXPECT_DOUBLE_EQ(x(0, 0), 3.0);
    EXPECT_DOUBLE_EQ(x(0, 1), -1.0);
    EXPECT_DOUBLE_EQ(x(1, 0), 2.0);
    EXPECT_DOUBLE_EQ(x(1, 1), 7.0);
}

TEST(Solve, SingularRejected) {
    EXPECT_THROW(solve(Matrix{{1, 2}, {2, 4}}, Matrix{{1}, {1}}), SingularMatrixError);
}

TEST(Solve, NeedsSquareSystem) {
    EXPECT_THROW(solve(Matrix{{1, 2, 3}, {4, 5, 6}}, Matrix{{1}, {1}}), ValidationError);
}

// Accepted systems must satisfy the relative residual bound.
TEST(Solve, ResidualOnRandomSystems) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        Matrix a(3, 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) a(i, j) = dist(rng);
        const Matrix sym = a * transpose(a);
        Matrix rhs(3, 2);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 2; ++j) rhs(i, j) = dist(rng);
        Matrix x;
        try {
            x = solve(sym, rhs);
        } catch (const SingularMatrixError&) {
            continue;
        }
        const Matrix back = sym * x;
        double residual = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 2; ++j) {
                residual = std::max(residual, std::abs(back(i, j) - rhs(i, j)));
                scale = std::max(scale, std::abs(rhs(i, j)));
            }
        }
        EXPECT_LE(residual / scale, 1e-10);
    }
}

TEST(Det, Diagonal) { EXPECT_DOUBLE_EQ(det(Matrix{{2, 0}, {0, 3}}), 6.0); }

TEST(Det, SingularIsZero) { EXPECT_DOUBLE_EQ(det(Matrix{{1, 2}, {2, 4}}), 0.0); }

TEST(Det, PermutationSign) { EXPECT_DOUBLE_EQ(det(Matrix{{0, 1}, {1, 0}}), -1.0); }

TEST(Det, OneByOne) { EXPECT_DOUBLE_EQ(det(Matrix{{-7.5}}), -7.5); }

TEST(RightPinv, RowVector) {
    const Matrix p = right_pinv(Matrix{{3, 4}});
    ASSERT_EQ(p.rows(), 2u);
    ASSERT_EQ(p.cols(), 1u);
    EXPECT_NEAR(p(0, 0), 3.0 / 25.0, 1e-15);
    EXPECT_NEAR(p(1, 0), 4.0 / 25.0, 1e-15);
}

TEST(RightPinv, OrthonormalRowsGiveTranspose) {
    const Matrix a{{1, 0, 0}, {0, 1, 0}};
    const Matrix p = right_pinv(a);
    ASSERT_EQ(p.rows(), 3u);
    ASSERT_EQ(p.cols(), 2u);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(p(i, j), a(j, i), 1e-15);
}

TEST(RightPinv, ProducesRightIdentity) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Matrix a(2, 5);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 5; ++j) a(i, j) = dist(rng);
        Matrix p;
        try {
            p = right_pinv(a);
        } catch (const SingularMatrixError&) {
            continue;
        }
        const Matrix id = a * p;
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                EXPECT_NEAR(id(i, j), i == j ? 1.0 : 0.0, 1e-9);
    }
}

TEST(RightPinv, RejectsTall) { EXPECT_THROW(right_pinv(Matrix{{1}, {2}}), ValidationError); }

TEST(LeftPinv, ColumnVector) {
    const Matrix p = left_pinv(Matrix{{3}, {4}});
    ASSERT_EQ(p.rows(), 1u);
    ASSERT_EQ(p.cols(), 2u);
    EXPECT_NEAR(p(0, 0), 3.0 / 25.0, 1e-15);
    EXPECT_NEAR(p(0, 1), 4.0 / 25.0, 1e-15);
}

TEST(LeftPinv, IdentityIsItsOwnInverse) {
    const Matrix p = left_pinv(Matrix::identity(3));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(p(i, j), i == j ? 1.0 : 0.0, 1e-15);
}

// left_pinv(A^T) = right_pinv(A)^T for full-row-rank wide A.
TEST(LeftPinv, DualityWithRightPinv) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Matrix a(3, 6);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 6; ++j) a(i, j) = dist(rng);
        Matrix lhs, rhs;
        try {
            lhs = left_pinv(transpose(a));
            rhs = transpose(right_pinv(a));
        } catch (const SingularMatrixError&) {
            continue;
        }
        for (std::size_t i = 0; i < lhs.rows(); ++i)
            for (std::size_t j = 0; j < lhs.cols(); ++j)
                EXPECT_NEAR(lhs(i, j), rhs(i, j), 1e-12);
    }
}

TEST(Minors, LexicographicPairs) {
    const Matrix a{{1, 2, 3}, {4, 5, 6}};
    const auto minors = enumerate_minors(a, 2);
    ASSERT_EQ(minors.size(), 3u);
    EXPECT_EQ(minors[0].index.columns, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(minors[1].index.columns, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(minors[2].index.columns, (std::vector<std::size_t>{1, 2}));
    EXPECT_DOUBLE_EQ(minors[0].det, 1 * 5 - 2 * 4);
    EXPECT_DOUBLE_EQ(minors[1].det, 1 * 6 - 3 * 4);
    EXPECT_DOUBLE_EQ(minors[2].det, 2 * 6 - 3 * 5);
}

TEST(Minors, OrderOneBaseCase) {
    const auto minors = enumerate_minors(Matrix{{3, 4}}, 1);
    ASSERT_EQ(minors.size(), 2u);
    EXPECT_DOUBLE_EQ(minors[0].det, 3.0);
    EXPECT_DOUBLE_EQ(minors[1].det, 4.0);
    double sum_sq = 0.0;
    for (const auto& m : minors) sum_sq += m.det * m.det;
    EXPECT_DOUBLE_EQ(sum_sq, 25.0);  // = det(A A^T)
}

TEST(Minors, CountHelper) {
    EXPECT_DOUBLE_EQ(minor_count(3, 2), 3.0);
    EXPECT_DOUBLE_EQ(minor_count(6, 3), 20.0);
    EXPECT_DOUBLE_EQ(minor_count(4, 0), 1.0);
    EXPECT_GT(minor_count(50, 25), 1e6);
}

// det(A A^T) equals the sum of squared order-r column minors.
TEST(Minors, BinetCauchyIdentity) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::uniform_int_distribution<std::size_t> rdist(1, 3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t r = rdist(rng);
        std::uniform_int_distribution<std::size_t> sdist(r, 6);
        const std::size_t s = sdist(rng);
        Matrix a(r, s);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < s; ++j) a(i, j) = dist(rng);
        const double lhs = det(a * transpose(a));
        double rhs = 0.0;
        for (const auto& m : enumerate_minors(a, r)) rhs += m.det * m.det;
        EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST(Matrix, AllFinite) {
    Matrix a{{1, 2}, {3, 4}};
    EXPECT_TRUE(a.all_finite());
    a(1, 1) = std::nan("");
    EXPECT_FALSE(a.all_finite());
}
