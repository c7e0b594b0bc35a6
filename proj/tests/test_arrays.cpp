#include "loopair/arrays.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"

using namespace loopair;
using loopair::testing::expect_matrix_near;
using loopair::testing::load_radiator;
using loopair::testing::max_abs_diff;

namespace {

// Radiator reference arrays (4-decimal print precision).
const std::vector<std::vector<double>> kRadiatorRnga = {
    {0.7166, -0.0370, 0.3470, -0.0267},
    {-0.0486, 0.6350, -0.0210, 0.4345},
};
const std::vector<std::vector<double>> kRadiatorRga = {
    {0.4884, -0.0194, 0.5664, -0.0354},
    {-0.0250, 0.3759, -0.0279, 0.6770},
};
const std::vector<double> kRadiatorRngaColSums = {0.668, 0.598, 0.326, 0.4078};
const std::vector<double> kRadiatorRgaColSums = {0.4634, 0.3565, 0.5385, 0.6416};

Matrix random_wide(std::mt19937_64& rng, std::size_t r, std::size_t s) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix m(r, s);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < s; ++j) {
            double x;
            do {
                x = dist(rng);
            } while (std::abs(x) < 0.05);
            m(i, j) = x;
        }
    }
    return m;
}

}  // namespace

TEST(Rnga, RadiatorMatchesReference) {
    const GainArray lambda = rnga(normalized_gain(load_radiator()));
    EXPECT_EQ(lambda.role, GainRole::relative_normalized);
    EXPECT_EQ(lambda.shape, ShapeClass::wide);
    expect_matrix_near(lambda.values, kRadiatorRnga, 1e-3);
}

TEST(Rga, RadiatorMatchesReference) {
    const GainArray lambda = rga(steady_state_gain(load_radiator()));
    EXPECT_EQ(lambda.role, GainRole::relative);
    expect_matrix_near(lambda.values, kRadiatorRga, 1e-3);
}

TEST(Rnga, RowVector) {
    const GainArray lambda = rnga(make_gain_array(GainRole::normalized, Matrix{{3, 4}}));
    EXPECT_NEAR(lambda.values(0, 0), 0.36, 1e-15);
    EXPECT_NEAR(lambda.values(0, 1), 0.64, 1e-15);
}

TEST(Rga, IdentityGivesIdentity) {
    const GainArray lambda = rga(make_gain_array(GainRole::steady_state, Matrix::identity(3)));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            EXPECT_NEAR(lambda.values(i, j), i == j ? 1.0 : 0.0, 1e-15);
}

TEST(Rnga, RoleIsChecked) {
    EXPECT_THROW(rnga(steady_state_gain(load_radiator())), ValidationError);
    EXPECT_THROW(rga(normalized_gain(load_radiator())), ValidationError);
}

TEST(Rnga, SingularCarriesShapeContext) {
    const GainArray degenerate =
        make_gain_array(GainRole::normalized, Matrix{{1, 2, 1}, {2, 4, 2}});
    try {
        rnga(degenerate);
        FAIL() << "expected SingularMatrixError";
    } catch (const SingularMatrixError& e) {
        EXPECT_NE(std::string(e.what()).find("2x3"), std::string::npos) << e.what();
    }
}

// The tall formula on the transpose reproduces the wide result transposed.
TEST(Rnga, TransposeDuality) {
    const GainArray nga = normalized_gain(load_radiator());
    const GainArray wide = rnga(nga);
    const GainArray tall = rnga(make_gain_array(GainRole::normalized, transpose(nga.values)));
    EXPECT_EQ(tall.shape, ShapeClass::tall);
    EXPECT_LE(max_abs_diff(tall.values, transpose(wide.values)), 1e-12);
}

TEST(Sums, RadiatorRowSumsAreOne) {
    const TransferMatrix tm = load_radiator();
    for (const GainArray& lambda : {rnga(normalized_gain(tm)), rga(steady_state_gain(tm))}) {
        const SumVector rows = row_sums(lambda);
        ASSERT_EQ(rows.values.size(), 2u);
        EXPECT_NEAR(rows.values[0], 1.0, 1e-9);
        EXPECT_NEAR(rows.values[1], 1.0, 1e-9);
    }
}

TEST(Sums, RadiatorColumnSums) {
    const TransferMatrix tm = load_radiator();
    const SumVector rn = col_sums(rnga(normalized_gain(tm)));
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(rn.values[j], kRadiatorRngaColSums[j], 1e-3);
    const SumVector rg = col_sums(rga(steady_state_gain(tm)));
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(rg.values[j], kRadiatorRgaColSums[j], 1e-3);
}

TEST(Sums, SingleRowSumsToOne) {
    const SumVector rows = row_sums(rnga(make_gain_array(GainRole::normalized, Matrix{{3, 4}})));
    EXPECT_NEAR(rows.values[0], 1.0, 1e-15);
}

TEST(Sums, SquareRgaColumnsSumToOne) {
    const GainArray lambda =
        rga(make_gain_array(GainRole::steady_state, Matrix{{2, 1}, {1, 3}}));
    const SumVector cols = col_sums(lambda);
    EXPECT_NEAR(cols.values[0], 1.0, 1e-12);
    EXPECT_NEAR(cols.values[1], 1.0, 1e-12);
}

TEST(Sums, TallColumnSumsRejected) {
    const GainArray tall = make_gain_array(
        GainRole::relative_normalized, Matrix{{0.5}, {0.5}});
    EXPECT_THROW(col_sums(tall), ValidationError);
}

TEST(Sums, RoleIsChecked) {
    EXPECT_THROW(row_sums(normalized_gain(load_radiator())), ValidationError);
    EXPECT_THROW(col_sums(steady_state_gain(load_radiator())), ValidationError);
}

TEST(BinetCauchy, RowVectorBaseCase) {
    const GainArray base = make_gain_array(GainRole::normalized, Matrix{{3, 4}});
    EXPECT_DOUBLE_EQ(col_sum_binet_cauchy(base, 0), 0.36);
    EXPECT_DOUBLE_EQ(col_sum_binet_cauchy(base, 1), 0.64);
}

TEST(BinetCauchy, AgreesWithPseudoInverseColumnSums) {
    const TransferMatrix tm = load_radiator();
    const GainArray nga = normalized_gain(tm);
    const SumVector cols = col_sums(rnga(nga));
    for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_NEAR(col_sum_binet_cauchy(nga, j), cols.values[j], 1e-9);
    }
    const GainArray k = steady_state_gain(tm);
    const SumVector rga_cols = col_sums(rga(k));
    for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_NEAR(col_sum_binet_cauchy(k, j), rga_cols.values[j], 1e-9);
    }
}

// Every order-r minor is counted once per column it contains, so the
// column sums add up to r.
TEST(BinetCauchy, ColumnSumsTotalRowCount) {
    const GainArray nga = normalized_gain(load_radiator());
    double total = 0.0;
    for (std::size_t j = 0; j < 4; ++j) total += col_sum_binet_cauchy(nga, j);
    EXPECT_NEAR(total, 2.0, 1e-12);
}

TEST(BinetCauchy, RadiatorGramianDeterminant) {
    const GainArray nga = normalized_gain(load_radiator());
    const Matrix a = nga.values;
    const double d = det(a * transpose(a));
    EXPECT_NEAR(d, 1.8828225137e-7, 1e-6 * 1.8828225137e-7);
    // independent route: 2x2 Gramian determinant from the rows directly
    double aa = 0.0, bb = 0.0, cc = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
        aa += a(0, j) * a(0, j);
        bb += a(0, j) * a(1, j);
        cc += a(1, j) * a(1, j);
    }
    EXPECT_NEAR(d, aa * cc - bb * bb, 1e-12 * std::abs(d));
}

TEST(BinetCauchy, RejectsRelativeRoleAndTallShape) {
    const GainArray lambda = rnga(normalized_gain(load_radiator()));
    EXPECT_THROW(col_sum_binet_cauchy(lambda, 0), ValidationError);
    const GainArray tall = make_gain_array(GainRole::normalized, Matrix{{1}, {2}});
    EXPECT_THROW(col_sum_binet_cauchy(tall, 0), ValidationError);
}

TEST(Scaling, OutputScalingLeavesRngaUnchanged) {
    const GainArray nga = normalized_gain(load_radiator());
    const GainArray reference = rnga(nga);
    const GainArray scaled = rnga(scale_outputs(nga, {5.0, 0.2}));
    EXPECT_LE(max_abs_diff(scaled.values, reference.values), 1e-12);
}

TEST(Scaling, IdentityDiagonalIsNoOp) {
    const GainArray nga = normalized_gain(load_radiator());
    EXPECT_LE(max_abs_diff(scale_outputs(nga, {1, 1}).values, nga.values), 0.0);
    EXPECT_LE(max_abs_diff(scale_inputs(nga, {1, 1, 1, 1}).values, nga.values), 0.0);
}

TEST(Scaling, RowVectorOutputScaling) {
    const GainArray nga = make_gain_array(GainRole::normalized, Matrix{{3, 4}});
    const GainArray lambda = rnga(scale_outputs(nga, {7.0}));
    EXPECT_NEAR(lambda.values(0, 0), 0.36, 1e-15);
    EXPECT_NEAR(lambda.values(0, 1), 0.64, 1e-15);
}

// Input scaling changes the array: [3,4] with q = diag(2,1) becomes [6,4],
// whose interaction elements are 36/52 and 16/52.
TEST(Scaling, InputScalingChangesRnga) {
    const GainArray nga = make_gain_array(GainRole::normalized, Matrix{{3, 4}});
    const GainArray lambda = rnga(scale_inputs(nga, {2.0, 1.0}));
    EXPECT_NEAR(lambda.values(0, 0), 36.0 / 52.0, 1e-12);
    EXPECT_NEAR(lambda.values(0, 1), 16.0 / 52.0, 1e-12);
}

TEST(Scaling, RadiatorInputScalingWitness) {
    const GainArray nga = normalized_gain(load_radiator());
    const GainArray reference = rnga(nga);
    const GainArray scaled = rnga(scale_inputs(nga, {2.0, 1.0, 1.0, 1.0}));
    EXPECT_GT(max_abs_diff(scaled.values, reference.values), 1e-6);
}

TEST(Scaling, ZeroDiagonalRejected) {
    const GainArray nga = normalized_gain(load_radiator());
    EXPECT_THROW(scale_outputs(nga, {1.0, 0.0}), ValidationError);
    EXPECT_THROW(scale_inputs(nga, {1, 1, 0, 1}), ValidationError);
    EXPECT_THROW(scale_outputs(nga, {1.0}), ValidationError);  // wrong length
}

TEST(Permute, RowVectorColumnSwap) {
    const GainArray nga = make_gain_array(GainRole::normalized, Matrix{{3, 4}});
    const GainArray lambda = rnga(permute(nga, {0}, {1, 0}));
    EXPECT_NEAR(lambda.values(0, 0), 0.64, 1e-15);
    EXPECT_NEAR(lambda.values(0, 1), 0.36, 1e-15);
}

TEST(Permute, IdentityPermutation) {
    const GainArray nga = normalized_gain(load_radiator());
    EXPECT_LE(max_abs_diff(permute(nga, {0, 1}, {0, 1, 2, 3}).values, nga.values), 0.0);
}

// Permuting the base array permutes the interaction array the same way.
TEST(Permute, RadiatorRowSwapColumnCycle) {
    const GainArray nga = normalized_gain(load_radiator());
    const std::vector<std::size_t> pr{1, 0};
    const std::vector<std::size_t> ps{1, 2, 3, 0};
    const GainArray direct = rnga(permute(nga, pr, ps));
    const GainArray mapped = permute(rnga(nga), pr, ps);
    EXPECT_LE(max_abs_diff(direct.values, mapped.values), 1e-12);
    // against the printed reference, permuted the same way
    std::vector<std::vector<double>> permuted(2, std::vector<double>(4));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 4; ++j) permuted[i][j] = kRadiatorRnga[pr[i]][ps[j]];
    expect_matrix_near(direct.values, permuted, 1e-3);
}

TEST(Permute, InvalidPermutationRejected) {
    const GainArray nga = normalized_gain(load_radiator());
    EXPECT_THROW(permute(nga, {0, 0}, {0, 1, 2, 3}), ValidationError);
    EXPECT_THROW(permute(nga, {0, 1}, {0, 1, 2}), ValidationError);
    EXPECT_THROW(permute(nga, {0, 2}, {0, 1, 2, 3}), ValidationError);
}

// Random wide arrays: row sums 1, column sums within [0,1], oracle
// agreement and duality, at the documented tolerances.
TEST(Properties, RandomWideArrays) {
    std::mt19937_64 rng(20230917);
    std::uniform_int_distribution<std::size_t> rdist(1, 3);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t r = rdist(rng);
        std::uniform_int_distribution<std::size_t> sdist(r + 1, 6);
        const std::size_t s = sdist(rng);
        GainArray nga;
        GainArray lambda;
        try {
            nga = make_gain_array(GainRole::normalized, random_wide(rng, r, s));
            lambda = rnga(nga);
        } catch (const SingularMatrixError&) {
            continue;
        }
        for (double v : row_sums(lambda).values) EXPECT_NEAR(v, 1.0, 1e-9);
        const SumVector cols = col_sums(lambda);
        for (std::size_t j = 0; j < s; ++j) {
            EXPECT_GE(cols.values[j], -1e-9);
            EXPECT_LE(cols.values[j], 1.0 + 1e-9);
            EXPECT_NEAR(col_sum_binet_cauchy(nga, j), cols.values[j], 1e-9);
        }
        const GainArray tall = make_gain_array(GainRole::normalized, transpose(nga.values));
        EXPECT_LE(max_abs_diff(rnga(tall).values, transpose(lambda.values)), 1e-9);
    }
}
