#include <gtest/gtest.h>

#include <cstring>

#include "test_support.hpp"

namespace ssae {
namespace {

using testing::Mat;

TEST(Generate, SingletonsReproduceTruthExactly) {
    SynthSpec spec;
    spec.N = 12;
    spec.K = 4;
    spec.n = 40;
    spec.min_concepts = 1;
    spec.max_concepts = 1;
    spec.seed = 3;
    const auto ds = generate(spec);
    for (Index i = 0; i < spec.n; ++i) {
        ASSERT_EQ(ds.real.set(i).size(), 1u);
        EXPECT_EQ(ds.x.col(i), ds.truth.col(ds.real.set(i)[0]));
    }
}

TEST(Generate, TruthColumnsAreUnitNorm) {
    const auto ds = generate(SynthSpec{});
    for (Index k = 0; k < ds.truth.cols(); ++k) EXPECT_NEAR(ds.truth.col(k).norm(), 1.0, 1e-14);
}

TEST(Generate, HoldoutPairsNeverCoOccur) {
    SynthSpec spec;
    spec.holdout_pairs = {{0, 1}, {2, 5}};
    spec.max_concepts = 4;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        spec.seed = seed;
        const auto ds = generate(spec);
        EXPECT_TRUE(check_composability(ds.real, 0, 1));
        EXPECT_TRUE(check_composability(ds.real, 2, 5));
        EXPECT_FALSE(check_composability(ds.real, 0, 2));
    }
}

TEST(Generate, SetSizesRespectBounds) {
    SynthSpec spec;
    spec.min_concepts = 2;
    spec.max_concepts = 3;
    const auto ds = generate(spec);
    for (const auto& s : ds.real.concept_sets) {
        EXPECT_GE(s.size(), 2u);
        EXPECT_LE(s.size(), 3u);
    }
}

TEST(Generate, DeterministicPerSeed) {
    SynthSpec spec;
    spec.noise_sigma = 0.05;
    spec.seed = 17;
    const auto a = generate(spec), b = generate(spec);
    EXPECT_EQ(std::memcmp(a.x.data(), b.x.data(), sizeof(double) * std::size_t(a.x.size())), 0);
    EXPECT_EQ(a.real.concept_sets, b.real.concept_sets);
    EXPECT_EQ(a.real.sample_ids, b.real.sample_ids);
    spec.seed = 18;
    EXPECT_NE(generate(spec).real.concept_sets, a.real.concept_sets);
}

TEST(Generate, NoiseMatchesSigma) {
    SynthSpec spec;
    spec.noise_sigma = 0.01;
    spec.seed = 4;
    const auto ds = generate(spec);
    const Mat clean = ds.truth * membership_matrix(SparseDesign(spec.d, spec.K), ds.real);
    const Mat noise = ds.x - clean;
    const double sigma = std::sqrt(noise.squaredNorm() / double(noise.size()));
    EXPECT_NEAR(sigma, 0.01, 0.0005);
}

TEST(Generate, MembershipHasFullRankAndOlsRecoversTruth) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SynthSpec spec;
        spec.seed = seed;
        spec.holdout_pairs = {{0, 1}};
        const auto ds = generate(spec);
        const Mat b = membership_matrix(SparseDesign(spec.d, spec.K), ds.real);
        ASSERT_TRUE(dependent_rows(b).empty());
        const Mat u = solve_ols(ds.x, b);
        for (Index k = 0; k < spec.K; ++k) EXPECT_LT(relative_error(u.col(k), ds.truth.col(k)), 1e-9);
    }
}

TEST(Generate, RankFailureIsReported) {
    SynthSpec spec;
    spec.K = 6;
    spec.n = 3;  // fewer samples than concepts: B cannot have full row rank
    EXPECT_THROW(generate(spec), NumericalError);
}

TEST(Generate, InvalidSpecs) {
    SynthSpec spec;
    spec.n = 0;
    EXPECT_THROW(generate(spec), UsageError);
    spec = SynthSpec{};
    spec.max_concepts = 9;
    EXPECT_THROW(generate(spec), UsageError);
    spec = SynthSpec{};
    spec.noise_sigma = -1.0;
    EXPECT_THROW(generate(spec), UsageError);
    spec = SynthSpec{};
    spec.holdout_pairs = {{0, 8}};
    EXPECT_THROW(generate(spec), UsageError);
}

TEST(RecoveryError, PlantedModelIsZero) {
    const auto ds = generate(SynthSpec{});
    for (double e : recovery_error(planted_model(ds.truth, 4), ds.truth)) EXPECT_LT(e, 1e-15);
}

TEST(RecoveryError, InvariantUnderRelabeling) {
    std::mt19937_64 rng(5);
    const auto m = testing::random_model(rng, 2, 4, 6, Activation::relu);
    Mat truth = testing::random_matrix(rng, 6, 4);
    const auto base = recovery_error(m, truth);
    const std::vector<Index> perm{2, 0, 3, 1};
    SsaeModel<double> r = m;
    Mat truth_r = truth;
    for (Index c = 0; c < 4; ++c) {
        const Index to = perm[std::size_t(c)];
        r.yc.col(to) = m.yc.col(c);
        r.w2.middleCols(to * 2, 2) = m.w2.middleCols(c * 2, 2);
        truth_r.col(to) = truth.col(c);
    }
    const auto relabeled = recovery_error(r, truth_r);
    for (Index c = 0; c < 4; ++c) EXPECT_EQ(relabeled[std::size_t(perm[std::size_t(c)])], base[std::size_t(c)]);
}

TEST(RecoveryError, TrainedOnNoiselessData) {
    SynthSpec spec;
    spec.seed = 9;
    const auto ds = generate(spec);
    TrainConfig cfg;
    cfg.learning_rate = 1e-2;
    cfg.epochs = 1000;
    cfg.activation = Activation::identity;
    const auto [m, rep] = train(init_model(SparseDesign(spec.d, spec.K), spec.N, cfg), ds.x, ds.real, cfg);
    for (double e : recovery_error(m, ds.truth)) EXPECT_LT(e, 1e-2);
}

TEST(RecoveryError, DimensionMismatch) {
    const auto m = planted_model(Mat::Identity(3, 3), 1);
    EXPECT_THROW(recovery_error(m, Mat::Identity(4, 3)), DataError);
}

}  // namespace
}  // namespace ssae
