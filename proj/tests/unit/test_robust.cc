#include <cmath>
#include <gtest/gtest.h>

#include "mdepose/geometry/two_view.h"
#include "mdepose/robust/estimator.h"
#include "mdepose/robust/refinement.h"
#include "gradient_check.h"
#include "test_support.h"

using namespace mdepose;

namespace {

const CameraIntrinsics K = test::default_intrinsics();

double pose_err(const Pose &est, const Pose &gt) {
    const auto et = translation_error(est.t, gt.t);
    return pose_error(rotation_error(est.R, gt.R), et.ok() ? *et : 180.0);
}

// Pixel matches with exact depth; a fraction replaced by uniform outliers
// and keypoints perturbed by Gaussian noise.
std::vector<Correspondence> noisy_scene(std::mt19937_64 &gen, const Pose &pose, std::size_t n, double noise_px,
                                        double outlier_fraction) {
    auto corrs = test::pixel_correspondences(test::forward_points(gen, pose, n), K, K);
    std::normal_distribution<double> nd(0.0, noise_px > 0 ? noise_px : 1.0);
    std::uniform_real_distribution<double> ux(0.0, 640.0), uy(0.0, 480.0), uz(2.0, 10.0);
    const auto n_out = static_cast<std::size_t>(std::round(outlier_fraction * n));
    for (std::size_t i = 0; i < corrs.size(); ++i) {
        if (i < n_out) {
            corrs[i].x2 = {ux(gen), uy(gen)};
            corrs[i].d2 = uz(gen);
        } else if (noise_px > 0) {
            corrs[i].x1 += Eigen::Vector2d(nd(gen), nd(gen));
            corrs[i].x2 += Eigen::Vector2d(nd(gen), nd(gen));
        }
    }
    return corrs;
}

} // namespace

TEST(Presets, Definitions) {
    const auto B = EstimatorConfig::preset(EstimatorId::kB);
    EXPECT_EQ(B.minimal_solver, MinimalSolverKind::kEssential5pt);
    EXPECT_EQ(B.scoring, ResidualKind::kSampson);
    const auto H = EstimatorConfig::preset(EstimatorId::kH);
    EXPECT_EQ(H.minimal_solver, MinimalSolverKind::kDepth3pt);
    EXPECT_EQ(H.scoring, ResidualKind::kSampson);
    EXPECT_EQ(H.local_optimization, ResidualKind::kSampsonPlusReprojection);
    const auto R = EstimatorConfig::preset(EstimatorId::kR);
    EXPECT_EQ(R.scoring, ResidualKind::kReprojection);
    EXPECT_EQ(R.local_optimization, ResidualKind::kReprojection);
    EXPECT_TRUE(EstimatorConfig::preset(EstimatorId::kGtH).is_gt_depth());
    EXPECT_EQ(H.max_iterations, 1000);
    for (auto id : {EstimatorId::kB, EstimatorId::kH, EstimatorId::kR, EstimatorId::kGtH, EstimatorId::kGtR})
        EXPECT_EQ(parse_estimator_id(estimator_name(id)), id);
    EXPECT_FALSE(parse_estimator_id("X").has_value());
}

TEST(Presets, ValidateRejectsBadValues) {
    auto c = EstimatorConfig::preset(EstimatorId::kH);
    c.sampson_threshold_px = 0.0;
    EXPECT_THROW(c.validate(), Error);
    c = EstimatorConfig::preset(EstimatorId::kH);
    c.max_iterations = 0;
    EXPECT_THROW(c.validate(), Error);
}

TEST(ScoreModel, ExactModelScoresZero) {
    std::mt19937_64 gen(31);
    const Pose pose = test::random_relative_pose(gen);
    const auto corrs = noisy_scene(gen, pose, 50, 0.0, 0.0);
    for (auto id : {EstimatorId::kB, EstimatorId::kH, EstimatorId::kR}) {
        const auto s = score_model({pose, 1.0}, corrs, EstimatorConfig::preset(id), K, K);
        EXPECT_LT(s.score, 1e-12);
        EXPECT_EQ(s.num_inliers, corrs.size());
    }
}

TEST(ScoreModel, ResidualAtThresholdIsOutlier) {
    const Pose pose{Eigen::Matrix3d::Identity(), {-1.0, 0.0, 0.0}};
    auto config = EstimatorConfig::preset(EstimatorId::kR);
    const Eigen::Vector3d X(0.3, 0.2, 4.0), X2 = pose.apply(X);
    Correspondence c{K.project(X), K.project(X2), X.z(), X2.z()};
    c.x2.y() += config.reproj_threshold_px;
    const double e = sym_reprojection_error({pose, 1.0}, c, K, K);
    config.reproj_threshold_px = e;
    const std::vector<Correspondence> one{c};
    const auto s = score_model({pose, 1.0}, one, config, K, K);
    EXPECT_EQ(s.num_inliers, 0u);
    EXPECT_DOUBLE_EQ(s.score, e * e);
}

TEST(ScoreModel, MatchesPerPointOracle) {
    std::mt19937_64 gen(32);
    for (int trial = 0; trial < 20; ++trial) {
        const Pose pose = test::random_relative_pose(gen);
        const auto corrs = noisy_scene(gen, pose, 80, 2.0, 0.3);
        // Score a perturbed model so that residuals straddle the thresholds.
        const ScaledPose sp{{test::random_rotation(gen, 0.5) * pose.R, pose.t + Eigen::Vector3d(0.01, 0.0, -0.02)},
                            1.05};
        const auto E = *essential_from_pose(sp.pose);
        for (auto id : {EstimatorId::kB, EstimatorId::kH, EstimatorId::kR}) {
            const auto config = EstimatorConfig::preset(id);
            const double f2 = K.fx * K.fy;
            const double ts = config.sampson_threshold_px * config.sampson_threshold_px / f2;
            const double tr = config.reproj_threshold_px * config.reproj_threshold_px;
            double expected = 0.0;
            std::size_t inliers = 0;
            std::vector<std::uint8_t> mask;
            for (const auto &c : corrs) {
                const double s = sampson_error_sq(E, normalize_point(c.x1, K), normalize_point(c.x2, K));
                const double r = std::pow(sym_reprojection_error(sp, c, K, K), 2);
                bool in = false;
                if (config.scoring == ResidualKind::kSampson) {
                    in = s < ts;
                    expected += std::min(s, ts);
                } else {
                    in = r < tr;
                    expected += std::min(r, tr);
                }
                inliers += in;
                mask.push_back(in);
            }
            const auto got = score_model(sp, corrs, config, K, K);
            EXPECT_NEAR(got.score, expected, 1e-12 * std::max(1.0, expected));
            EXPECT_EQ(got.num_inliers, inliers);
            EXPECT_EQ(got.inlier_mask, mask);
        }
    }
}

TEST(Ransac, NoiselessRecoversPose) {
    std::mt19937_64 gen(33);
    for (auto id : {EstimatorId::kB, EstimatorId::kH, EstimatorId::kR}) {
        for (int trial = 0; trial < 5; ++trial) {
            const Pose pose = test::random_relative_pose(gen, 15.0);
            const auto corrs = noisy_scene(gen, pose, 200, 0.0, 0.0);
            const auto est = ransac_estimate(corrs, EstimatorConfig::preset(id), K, K, RansacSeed{7});
            ASSERT_TRUE(est.ok()) << estimator_name(id);
            EXPECT_LT(pose_err(est->scaled_pose.pose, pose), 1e-4) << estimator_name(id);
            EXPECT_EQ(est->num_inliers, corrs.size());
        }
    }
}

TEST(Ransac, RobustToOutliers) {
    std::mt19937_64 gen(34);
    const int trials = 200;
    int good = 0;
    for (int trial = 0; trial < trials; ++trial) {
        const Pose pose = test::random_relative_pose(gen, 15.0);
        const auto corrs = noisy_scene(gen, pose, 100, 0.5, 0.5);
        const auto est =
            ransac_estimate(corrs, EstimatorConfig::preset(EstimatorId::kH), K, K, RansacSeed{std::uint64_t(trial)});
        good += est.ok() && pose_err(est->scaled_pose.pose, pose) < 0.5;
    }
    EXPECT_GE(good, 190);
}

TEST(Ransac, SeedDeterminism) {
    std::mt19937_64 gen(35);
    const Pose pose = test::random_relative_pose(gen);
    const auto corrs = noisy_scene(gen, pose, 100, 1.0, 0.4);
    const auto config = EstimatorConfig::preset(EstimatorId::kH);
    const auto a = ransac_estimate(corrs, config, K, K, RansacSeed{5});
    const auto b = ransac_estimate(corrs, config, K, K, RansacSeed{5});
    ASSERT_TRUE(a.ok() && b.ok());
    EXPECT_EQ(a->scaled_pose.pose.R, b->scaled_pose.pose.R);
    EXPECT_EQ(a->scaled_pose.pose.t, b->scaled_pose.pose.t);
    EXPECT_EQ(a->inlier_mask, b->inlier_mask);
}

TEST(Ransac, Guards) {
    std::mt19937_64 gen(36);
    const Pose pose = test::random_relative_pose(gen);
    auto corrs = noisy_scene(gen, pose, 2, 0.0, 0.0);
    const auto r = ransac_estimate(corrs, EstimatorConfig::preset(EstimatorId::kH), K, K, RansacSeed{});
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.code(), ErrorCode::kInsufficientMatches);

    corrs = noisy_scene(gen, pose, 20, 0.0, 0.0);
    corrs[3].d1.reset();
    const auto d = ransac_estimate(corrs, EstimatorConfig::preset(EstimatorId::kH), K, K, RansacSeed{});
    ASSERT_FALSE(d.ok());
    EXPECT_EQ(d.code(), ErrorCode::kInvalidArgument);

    const auto b = ransac_estimate(std::span(corrs).first(4), EstimatorConfig::preset(EstimatorId::kB), K, K,
                                   RansacSeed{});
    EXPECT_EQ(b.code(), ErrorCode::kInsufficientMatches);
}

TEST(LocalOptimize, OptimumIsFixedPoint) {
    std::mt19937_64 gen(37);
    const Pose pose = test::random_relative_pose(gen);
    const auto corrs = noisy_scene(gen, pose, 60, 0.0, 0.0);
    const auto config = EstimatorConfig::preset(EstimatorId::kH);
    const ScaledPose out = local_optimize({pose, 1.0}, corrs, config, K, K);
    EXPECT_LT((out.pose.R - pose.R).norm(), 1e-10);
    EXPECT_LT((out.pose.t - pose.t).norm(), 1e-10);
    EXPECT_NEAR(out.sigma, 1.0, 1e-10);
}

TEST(LocalOptimize, ConvergesFromOneDegree) {
    std::mt19937_64 gen(38);
    for (auto id : {EstimatorId::kH, EstimatorId::kR}) {
        for (int trial = 0; trial < 10; ++trial) {
            const Pose pose = test::random_relative_pose(gen);
            const auto corrs = noisy_scene(gen, pose, 100, 0.0, 0.0);
            Eigen::Vector3d axis = Eigen::Vector3d::Random().normalized();
            const Pose start{rotation_from_axis_angle(axis * M_PI / 180.0) * pose.R, pose.t};
            const ScaledPose out = local_optimize({start, 1.0}, corrs, EstimatorConfig::preset(id), K, K);
            EXPECT_LT(rotation_error(out.pose.R, pose.R), 1e-5) << estimator_name(id);
            EXPECT_LT(*translation_error(out.pose.t, pose.t), 1e-5) << estimator_name(id);
        }
    }
}

TEST(Refinement, GradientMatchesFiniteDifferences) {
    std::mt19937_64 gen(39);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto kind : {ResidualKind::kSampson, ResidualKind::kReprojection, ResidualKind::kSampsonPlusReprojection})
        for (auto loss : {RefinementObjective::Loss::kTruncated, RefinementObjective::Loss::kCauchy}) {
            int checked = 0;
            while (checked < 30) {
                const Pose pose = test::random_relative_pose(gen);
                const auto corrs = noisy_scene(gen, pose, 40, 1.0, 0.0);
                const RefinementObjective obj(corrs, kind, loss, 2.0, 16.0, K, K);
                const ScaledPose sp{{rotation_from_axis_angle(0.003 * Eigen::Vector3d(u(gen), u(gen), u(gen))) * pose.R,
                                     pose.t + 0.01 * Eigen::Vector3d(u(gen), u(gen), u(gen))},
                                    1.0 + 0.02 * u(gen)};
                const auto cmp = test::compare_gradient(obj, sp);
                if (!cmp.smooth)
                    continue;
                ++checked;
                EXPECT_LT(cmp.relative_error, 1e-5) << residual_name(kind) << "\n"
                                                    << cmp.analytic.transpose() << "\n"
                                                    << cmp.central.transpose();
            }
        }
}

TEST(Refinement, KinkDetectorFlagsThresholdCrossing) {
    // One correspondence whose Sampson residual sits exactly at the
    // threshold: the truncated cost has a corner there.
    const Pose pose{Eigen::Matrix3d::Identity(), {-1.0, 0.0, 0.0}};
    const Eigen::Vector3d X(0.3, 0.2, 4.0), X2 = pose.apply(X);
    Correspondence c{K.project(X), K.project(X2), X.z(), X2.z()};
    c.x2.y() += 3.0;
    const std::vector<Correspondence> one{c};
    const double s = std::sqrt(sampson_error_sq(*essential_from_pose(pose), normalize_point(c.x1, K),
                                                normalize_point(c.x2, K))) * K.mean_focal();
    const RefinementObjective obj(one, ResidualKind::kSampson, RefinementObjective::Loss::kTruncated, s, 16.0, K, K);
    EXPECT_FALSE(test::compare_gradient(obj, {pose, 1.0}).smooth);
    const RefinementObjective wide(one, ResidualKind::kSampson, RefinementObjective::Loss::kTruncated, 2 * s, 16.0, K, K);
    const auto cmp = test::compare_gradient(wide, {pose, 1.0});
    EXPECT_TRUE(cmp.smooth);
    EXPECT_LT(cmp.relative_error, 1e-5);
}

TEST(Refinement, NormalEquationsGradientAgree) {
    std::mt19937_64 gen(40);
    const Pose pose = test::random_relative_pose(gen);
    const auto corrs = noisy_scene(gen, pose, 40, 1.0, 0.2);
    const RefinementObjective obj(corrs, ResidualKind::kSampsonPlusReprojection, RefinementObjective::Loss::kCauchy,
                                  2.0, 16.0, K, K);
    Matrix7d H;
    Vector7d g;
    const double c = obj.normal_equations({pose, 1.0}, &H, &g);
    EXPECT_NEAR(c, obj.cost({pose, 1.0}), 1e-9 * std::max(1.0, c));
    EXPECT_LT((g - obj.gradient({pose, 1.0})).norm(), 1e-9 * std::max(1.0, g.norm()));
    EXPECT_LT((H - H.transpose()).norm(), 1e-9 * H.norm());
}

TEST(GtDepth, NoiselessRecoversPose) {
    std::mt19937_64 gen(41);
    for (auto id : {EstimatorId::kGtH, EstimatorId::kGtR}) {
        const Pose pose = test::random_relative_pose(gen, 15.0);
        auto corrs = noisy_scene(gen, pose, 100, 0.0, 0.0);
        for (auto &c : corrs)
            c.d1 = c.d2 = std::nullopt;
        const auto est = gt_depth_estimate(corrs, pose, EstimatorConfig::preset(id), K, K, RansacSeed{3});
        ASSERT_TRUE(est.ok());
        EXPECT_LT(pose_err(est->scaled_pose.pose, pose), 1e-4);
    }
}

TEST(GtDepth, ToleratesOutliers) {
    std::mt19937_64 gen(42);
    for (int trial = 0; trial < 10; ++trial) {
        const Pose pose = test::random_relative_pose(gen, 15.0);
        const auto corrs = noisy_scene(gen, pose, 100, 0.5, 0.3);
        const auto est =
            gt_depth_estimate(corrs, pose, EstimatorConfig::preset(EstimatorId::kGtH), K, K, RansacSeed{std::uint64_t(trial)});
        ASSERT_TRUE(est.ok());
        EXPECT_LT(pose_err(est->scaled_pose.pose, pose), 0.5);
    }
}

TEST(GtDepth, PureRotationIsZeroBaseline) {
    std::mt19937_64 gen(43);
    const Pose pose{test::random_rotation(gen, 10.0), Eigen::Vector3d::Zero()};
    const auto corrs = noisy_scene(gen, pose, 20, 0.0, 0.0);
    const auto est = gt_depth_estimate(corrs, pose, EstimatorConfig::preset(EstimatorId::kGtH), K, K, RansacSeed{});
    ASSERT_FALSE(est.ok());
    EXPECT_EQ(est.code(), ErrorCode::kZeroBaseline);
}
