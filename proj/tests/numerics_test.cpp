#include <gtest/gtest.h>

#include <cstring>

#include "test_support.hpp"

namespace ssae {
namespace {

using testing::Mat;

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
    std::mt19937_64 rng(1);
    const Mat a = testing::random_matrix(rng, 3, 4);
    EXPECT_EQ(matmul(Mat::Identity(3, 3), a), a);
    EXPECT_EQ(matmul(a, Mat::Identity(4, 4)), a);
}

TEST(Matmul, HandCheckedTwoByTwo) {
    Mat a(2, 2), b(2, 1);
    a << 1, 2, 3, 4;
    b << 0, 1;
    const Mat c = matmul(a, b);
    ASSERT_EQ(c.rows(), 2);
    ASSERT_EQ(c.cols(), 1);
    EXPECT_EQ(c(0, 0), 2.0);
    EXPECT_EQ(c(1, 0), 4.0);
}

TEST(Matmul, MatchesTripleLoop) {
    std::mt19937_64 rng(7);
    const Mat a = testing::random_matrix(rng, 7, 5);
    const Mat b = testing::random_matrix(rng, 5, 3);
    const Mat ref = testing::loop_matmul(a, b);
    EXPECT_LT((matmul(a, b) - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Matmul, DimensionMismatchNamesBothShapes) {
    try {
        matmul(Mat(2, 3), Mat(4, 2));
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("2x3"), std::string::npos);
        EXPECT_NE(msg.find("4x2"), std::string::npos);
    }
}

TEST(Matmul, Deterministic) {
    std::mt19937_64 rng(3);
    const Mat a = testing::random_matrix(rng, 40, 30);
    const Mat b = testing::random_matrix(rng, 30, 20);
    const Mat c1 = matmul(a, b), c2 = matmul(a, b);
    EXPECT_EQ(std::memcmp(c1.data(), c2.data(), sizeof(double) * std::size_t(c1.size())), 0);
}

TEST(FrobeniusSq, Basics) {
    EXPECT_EQ(frobenius_sq(Mat::Zero(3, 4)), 0.0);
    Mat a(1, 2);
    a << 3, 4;
    EXPECT_EQ(frobenius_sq(a), 25.0);
}

TEST(FrobeniusSq, MatchesScalarLoop) {
    std::mt19937_64 rng(11);
    const Mat a = testing::random_matrix(rng, 6, 6);
    EXPECT_NEAR(frobenius_sq(a), testing::loop_sum_sq(a), 1e-12);
}

TEST(FrobeniusSq, PositiveUnlessZero) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 50; ++t) {
        Mat a = Mat::Zero(4, 5);
        std::uniform_int_distribution<Index> at(0, a.size() - 1);
        a.data()[at(rng)] = std::normal_distribution<double>(0, 1)(rng) + 1e-3;
        EXPECT_GT(frobenius_sq(a), 0.0);
    }
}

TEST(SolveOls, IdentityDesignReturnsData) {
    std::mt19937_64 rng(2);
    const Mat x = testing::random_matrix(rng, 6, 4);
    const Mat u = solve_ols(x, Mat::Identity(4, 4));
    EXPECT_LT((u - x).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SolveOls, RecoversPlantedFactor) {
    std::mt19937_64 rng(5);
    const auto real = testing::random_realizations(rng, 5, 40);
    const Mat b = membership_matrix<double>(SparseDesign(1, 5), real);
    ASSERT_TRUE(dependent_rows(b).empty());
    const Mat v = testing::random_matrix(rng, 9, 5);
    const Mat x = testing::loop_matmul(v, b);
    EXPECT_LT((solve_ols(x, b) - v).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SolveOls, ResidualIsOptimalAndOrthogonal) {
    std::mt19937_64 rng(6);
    const auto real = testing::random_realizations(rng, 4, 30);
    const Mat b = membership_matrix<double>(SparseDesign(1, 4), real);
    const Mat x = testing::random_matrix(rng, 8, 30);
    const Mat u = solve_ols(x, b);
    const Mat residual = x - u * b;
    const double best = testing::loop_sum_sq(residual);
    for (int t = 0; t < 100; ++t) {
        const Mat other = u + testing::random_matrix(rng, 8, 4, 1e-3);
        EXPECT_LE(best, testing::loop_sum_sq(x - other * b));
    }
    EXPECT_LT((residual * b.transpose()).norm(), 1e-8 * x.norm());
}

TEST(SolveOls, RankDeficiencyListsDependentRows) {
    // Row 2 duplicates row 0; row 3 never occurs.
    Mat b(4, 3);
    b << 1, 0, 1,
         0, 1, 1,
         1, 0, 1,
         0, 0, 0;
    EXPECT_EQ(dependent_rows(b), (std::vector<Index>{2, 3}));
    try {
        solve_ols(Mat::Zero(2, 3), b);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("dependent rows: 2 3"), std::string::npos) << e.what();
    }
}

TEST(SolveOls, SampleCountMismatch) {
    EXPECT_THROW(solve_ols(Mat::Zero(2, 3), Mat::Identity(2, 2)), DataError);
}

}  // namespace
}  // namespace ssae
