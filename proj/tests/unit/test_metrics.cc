#include <gtest/gtest.h>
#include <limits>

#include "metric_oracles.h"
#include "test_support.h"

using namespace mdepose;
using namespace mdepose::metrics;

namespace {

DepthEvalInput input(std::vector<double> est, std::vector<double> gt) { return {std::move(est), std::move(gt), {}}; }

} // namespace

TEST(PoseErrors, TrivialCases) {
    std::mt19937_64 gen(61);
    const Pose gt = test::random_relative_pose(gen);
    const auto same = pose_errors(gt, gt);
    EXPECT_EQ(same.e_r, 0.0);
    EXPECT_EQ(same.e_p, same.e_t);
    EXPECT_LT(same.e_t, 1e-6);
    const auto flipped = pose_errors({gt.R, -gt.t}, gt);
    EXPECT_EQ(flipped.e_t, 180.0);
    EXPECT_EQ(flipped.e_p, 180.0);
    const auto none = pose_errors({gt.R, Eigen::Vector3d::Zero()}, gt);
    EXPECT_EQ(none.e_t, kFailureErrorDeg);
}

TEST(PoseErrors, IdentityGivesExactZero) {
    const Pose p{Eigen::Matrix3d::Identity(), {0.0, 0.0, 1.0}};
    const auto e = pose_errors(p, p);
    EXPECT_EQ(e.e_r, 0.0);
    EXPECT_EQ(e.e_t, 0.0);
    EXPECT_EQ(e.e_p, 0.0);
}

TEST(Maa, TrivialCases) {
    EXPECT_EQ(maa(std::vector<double>(5, 0.0)), 1.0);
    EXPECT_EQ(maa(std::vector<double>(5, 1000.0)), 0.0);
    EXPECT_NEAR(maa(std::vector<double>{0.5, 5.5, 50.0}), 0.5, 1e-15);
    EXPECT_THROW(maa(std::vector<double>{}), Error);
}

TEST(Maa, StrictThresholdsAndNonFinite) {
    // An error of exactly 1 misses threshold 1 and hits 2..10.
    EXPECT_NEAR(maa(std::vector<double>{1.0}), 0.9, 1e-15);
    EXPECT_EQ(maa(std::vector<double>{10.0}), 0.0);
    EXPECT_EQ(maa(std::vector<double>{std::numeric_limits<double>::quiet_NaN()}), 0.0);
    EXPECT_NEAR(maa(std::vector<double>{3.0, 0.0}, 5), 0.7, 1e-15);
}

TEST(AbsRel, Cases) {
    EXPECT_EQ(abs_rel(input({1, 2, 3}, {1, 2, 3})), 0.0);
    EXPECT_EQ(abs_rel(input({1}, {2})), 0.5);
    DepthEvalInput masked{{1, 100}, {1, 1}, {1, 0}};
    EXPECT_EQ(abs_rel(masked), 0.0);
    EXPECT_THROW(abs_rel(DepthEvalInput{{1}, {1}, {0}}), Error);
    EXPECT_THROW(abs_rel(input({1}, {-1})), Error);
}

TEST(Delta1, StrictBoundary) {
    EXPECT_EQ(delta1(input({1, 2}, {1, 2})), 1.0);
    EXPECT_EQ(delta1(input({1.25}, {1})), 0.0);
    EXPECT_EQ(delta1(input({1.2}, {1})), 1.0);
    EXPECT_EQ(delta1(input({0.0, -1.0}, {1, 1})), 0.0);
}

TEST(AlignScale, Cases) {
    const auto a = align_scale(input({2, 4, 6}, {1, 2, 3}));
    EXPECT_DOUBLE_EQ(a.scale, 0.5);
    EXPECT_NEAR(abs_rel(a.aligned), 0.0, 1e-15);
    EXPECT_EQ(align_scale(input({1, 2}, {1, 2})).scale, 1.0);
    EXPECT_EQ(align_scale(input({2, 4, 6}, {1, 2, 3}), ScaleMethod::kMedianRatio).scale, 0.5);
    EXPECT_EQ(align_scale(input({1, 1, 1, 1}, {1, 2, 3, 4}), ScaleMethod::kMedianRatio).scale, 2.5);
    try {
        align_scale(input({-1, -2}, {1, 2}));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::kAlignmentDegenerate);
    }
}

TEST(AlignAffine, Cases) {
    std::vector<double> gt{2, 5, 7, 11}, est;
    for (double g : gt)
        est.push_back(0.5 * g + 3.0);
    const auto a = align_affine(input(est, gt));
    EXPECT_NEAR(a.a, 2.0, 1e-12);
    EXPECT_NEAR(a.b, -6.0, 1e-12);
    EXPECT_NEAR(abs_rel(a.aligned), 0.0, 1e-12);
    try {
        align_affine(input({3, 3, 3}, {1, 2, 3}));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::kDegenerateFit);
    }
}

TEST(AlignAffine, NonPositiveOutputsMasked) {
    std::vector<double> est, gt;
    for (int g = 1; g <= 20; ++g) {
        gt.push_back(g);
        est.push_back(g + 1.0);
    }
    est.push_back(0.5);
    gt.push_back(0.2);
    const auto a = align_affine(input(est, gt));
    EXPECT_LT(a.aligned.z_est[20], 0.0);
    EXPECT_EQ(a.aligned.mask[20], 0);
    EXPECT_EQ(a.aligned.num_selected(), 20u);
}

TEST(EvaluateDepth, AlignmentModes) {
    const auto in = input({2, 4, 6}, {1, 2, 3});
    EXPECT_NEAR(evaluate_depth(in, DepthAlignment::kNone).abs_rel, 1.0, 1e-15);
    EXPECT_NEAR(evaluate_depth(in, DepthAlignment::kScale).abs_rel, 0.0, 1e-15);
    EXPECT_NEAR(evaluate_depth(in, DepthAlignment::kAffine).abs_rel, 0.0, 1e-12);
    EXPECT_EQ(evaluate_depth(in, DepthAlignment::kScale).count, 3u);
}

TEST(Pearson, Cases) {
    const std::vector<double> x{0, 1, 2, 3, 4};
    std::vector<double> y, z;
    for (double v : x) {
        y.push_back(2 * v + 1);
        z.push_back(-v);
    }
    const auto f = pearson_and_fit(x, y);
    EXPECT_NEAR(f.r, 1.0, 1e-15);
    EXPECT_NEAR(f.slope, 2.0, 1e-15);
    EXPECT_NEAR(f.intercept, 1.0, 1e-15);
    EXPECT_NEAR(pearson_and_fit(x, z).r, -1.0, 1e-15);
    EXPECT_EQ(pearson_and_fit(x, std::vector<double>(5, 3.0)).r, 0.0);
    EXPECT_THROW(pearson_and_fit(std::vector<double>(3, 1.0), y), Error);
    EXPECT_THROW(pearson_and_fit(std::vector<double>{1.0}, std::vector<double>{2.0}), Error);
}

TEST(MetricOracles, RandomInstances) {
    for (const auto &[name, worst] : test::compare_metric_oracles(200, 62))
        EXPECT_LT(worst, 1e-10) << name;
}

TEST(Aggregate, GroupMeans) {
    const auto a = aggregate({{"A", {0.8, 0.6}}, {"B", {1.0}}});
    EXPECT_NEAR(a.group_means.at("A"), 0.7, 1e-15);
    EXPECT_EQ(a.group_means.at("B"), 1.0);
    EXPECT_NEAR(a.overall, 0.85, 1e-15);

    const auto single = aggregate({{"x", {0.3}}, {"y", {0.9}}});
    EXPECT_EQ(single.group_means.at("x"), 0.3);
    EXPECT_NEAR(single.overall, 0.6, 1e-15);
}

TEST(Aggregate, HierarchicalDiffersFromFlat) {
    // Flat mean (0.2 + 0.4 + 0.6 + 1.0) / 4 = 0.55; grouped (0.4 + 1.0) / 2 = 0.7.
    const auto a = aggregate({{"big", {0.2, 0.4, 0.6}}, {"small", {1.0}}});
    EXPECT_NEAR(a.overall, 0.7, 1e-15);
    EXPECT_GT(std::abs(a.overall - 0.55), 0.1);
    EXPECT_THROW(aggregate({{"e", {}}}), Error);
    EXPECT_THROW(aggregate({}), Error);
}

TEST(RankColumn, Rules) {
    EXPECT_EQ(rank_column(std::vector<double>{0.4}, RankOrder::kHigherIsBetter), (std::vector<int>{1}));
    EXPECT_EQ(rank_column(std::vector<double>{89.78, 90.59, 89.71}, RankOrder::kHigherIsBetter),
              (std::vector<int>{2, 1, 3}));
    EXPECT_EQ(rank_column(std::vector<double>{5, 7, 7, 1}, RankOrder::kHigherIsBetter), (std::vector<int>{3, 1, 1, 4}));
    EXPECT_EQ(rank_column(std::vector<double>{0.1, 0.1, 0.3}, RankOrder::kLowerIsBetter), (std::vector<int>{1, 1, 3}));
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EXPECT_EQ(rank_column(std::vector<double>{nan, 1.0, 2.0}, RankOrder::kHigherIsBetter), (std::vector<int>{3, 2, 1}));
}
