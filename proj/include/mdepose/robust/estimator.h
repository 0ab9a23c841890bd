#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mdepose/geometry/types.h"
#include "mdepose/solvers/minimal.h"
#include "mdepose/util/error.h"

namespace mdepose {

// B: five-point baseline without depth. H: depth solver, Sampson scoring,
// hybrid Sampson + reprojection LO. R: depth solver, reprojection scoring and
// LO. GT-H / GT-R: H / R fed with depths triangulated under the reference pose.
enum class EstimatorId { kB, kH, kR, kGtH, kGtR };

std::string_view estimator_name(EstimatorId id);
std::optional<EstimatorId> parse_estimator_id(std::string_view name);

enum class ResidualKind { kSampson, kReprojection, kSampsonPlusReprojection };

std::string_view residual_name(ResidualKind kind);
std::optional<ResidualKind> parse_residual_kind(std::string_view name);

struct EstimatorConfig {
    EstimatorId id = EstimatorId::kH;
    MinimalSolverKind minimal_solver = MinimalSolverKind::kDepth3pt;
    ResidualKind scoring = ResidualKind::kSampson;
    ResidualKind local_optimization = ResidualKind::kSampsonPlusReprojection;
    // Levenberg-Marquardt iterations with a Cauchy loss on the final inliers;
    // 0 disables the final refinement.
    int final_refinement_iterations = 100;
    double sampson_threshold_px = 2.0;
    double reproj_threshold_px = 16.0;
    int max_iterations = 1000;

    static EstimatorConfig preset(EstimatorId id);

    // Throws Error(kConfigError) on invalid thresholds or counts.
    void validate() const;

    bool uses_depth() const { return minimal_solver == MinimalSolverKind::kDepth3pt; }
    bool is_gt_depth() const { return id == EstimatorId::kGtH || id == EstimatorId::kGtR; }
    std::size_t sample_size() const { return minimal_solver == MinimalSolverKind::kEssential5pt ? 5 : 3; }
};

struct RansacSeed {
    std::uint64_t value = 0;
};

struct ModelScore {
    double score = 0.0;
    std::vector<std::uint8_t> inlier_mask;
    std::size_t num_inliers = 0;
};

struct PoseEstimate {
    ScaledPose scaled_pose;
    std::vector<std::uint8_t> inlier_mask;
    std::size_t num_inliers = 0;
    double score = 0.0;
    int iterations_run = 0;
    bool success = false;
};

// MSAC scoring with the configured scoring residual. Per point
// loss = min(r^2, tau^2); inlier iff r^2 < tau^2. Sampson residuals and their
// threshold live on the normalized plane of image 1 (tau_px / sqrt(fx * fy));
// reprojection residuals stay in pixels. For the hybrid kind both terms are
// summed in pixels^2 and an inlier must pass both thresholds.
ModelScore score_model(const ScaledPose &sp, std::span<const Correspondence> corrs, const EstimatorConfig &config,
                       const CameraIntrinsics &K1, const CameraIntrinsics &K2);

// LO-RANSAC over exactly config.max_iterations uniform minimal samples drawn
// from the seeded generator. Every strict new best model is refined with
// local_optimize on its inliers; the final model then gets the optional
// Cauchy refinement and is rescored.
// Errors: InsufficientMatches, EstimationFailed, InvalidArgument (depth
// estimator fed correspondences without depth).
Result<PoseEstimate> ransac_estimate(std::span<const Correspondence> corrs, const EstimatorConfig &config,
                                     const CameraIntrinsics &K1, const CameraIntrinsics &K2, RansacSeed seed);

// At most 25 LM iterations on the truncated config.local_optimization
// objective. Returns `initial` unless the objective strictly decreased.
ScaledPose local_optimize(const ScaledPose &initial, std::span<const Correspondence> inliers,
                          const EstimatorConfig &config, const CameraIntrinsics &K1, const CameraIntrinsics &K2);

// Reference-depth baseline: triangulates every match under gt_pose, drops the
// ones that fail, and runs ransac_estimate on the survivors with the H or R
// variant of `config`. Errors: ZeroBaseline, InsufficientMatches (< 3 left).
Result<PoseEstimate> gt_depth_estimate(std::span<const Correspondence> corrs, const Pose &gt_pose,
                                       const EstimatorConfig &config, const CameraIntrinsics &K1,
                                       const CameraIntrinsics &K2, RansacSeed seed);

} // namespace mdepose
