#pragma once

#include "mdepose/geometry/types.h"
#include "mdepose/util/error.h"

namespace mdepose {

// Pixel to normalized image plane.
Eigen::Vector2d normalize_point(const Eigen::Vector2d &x, const CameraIntrinsics &K);

// E = [t]x R scaled to unit Frobenius norm. Fails with ZeroBaseline for
// ||t|| < 1e-12.
Result<EssentialMatrix> essential_from_pose(const Pose &pose);

// Squared Sampson distance on the normalized plane. +inf when the gradient
// of the epipolar constraint vanishes (denominator < 1e-24).
double sampson_error_sq(const EssentialMatrix &E, const Eigen::Vector2d &x1n, const Eigen::Vector2d &x2n);

// Forward and backward transfer errors in pixels for a depth-lifted match.
// Either term is +inf when its transferred point is not in front of the
// target camera (depth <= 1e-9).
struct TransferErrors {
    double forward = 0.0;
    double backward = 0.0;
};

TransferErrors transfer_errors(const ScaledPose &sp, const Correspondence &c, const CameraIntrinsics &K1,
                               const CameraIntrinsics &K2);

// max(forward, backward) transfer error. Requires c.d1 and c.d2.
double sym_reprojection_error(const ScaledPose &sp, const Correspondence &c, const CameraIntrinsics &K1,
                              const CameraIntrinsics &K2);

// Two-view linear (DLT) triangulation from normalized coordinates.
// Errors: ZeroBaseline (||t|| < 1e-12), Degenerate (rays parallel within
// 1e-9 rad, or point at infinity), NegativeDepth (behind either camera).
Result<DepthPair> triangulate(const Pose &pose, const Eigen::Vector2d &x1n, const Eigen::Vector2d &x2n);

// Angular errors in degrees, evaluated with atan2(sin, cos).
double rotation_error(const Eigen::Matrix3d &R_est, const Eigen::Matrix3d &R_gt);
// UndefinedDirection when either vector has norm < 1e-12. No folding of the
// sign ambiguity: antiparallel vectors give 180 degrees.
Result<double> translation_error(const Eigen::Vector3d &t_est, const Eigen::Vector3d &t_gt);
inline double pose_error(double e_rotation, double e_translation) {
    return e_rotation > e_translation ? e_rotation : e_translation;
}

} // namespace mdepose
