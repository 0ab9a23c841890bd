#pragma once

#include <Eigen/Core>
#include <optional>

namespace mdepose {

// Pinhole intrinsics of an undistorted image, all values in pixels.
struct CameraIntrinsics {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 1;
    int height = 1;

    bool is_valid() const;

    // Geometric mean focal length, used to move pixel thresholds to the
    // normalized image plane.
    double mean_focal() const;

    Eigen::Matrix3d matrix() const;

    Eigen::Vector2d project(const Eigen::Vector3d &X) const {
        return {fx * X.x() / X.z() + cx, fy * X.y() / X.z() + cy};
    }
};

// Rigid transform X2 = R * X1 + t.
struct Pose {
    Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
    Eigen::Vector3d t = Eigen::Vector3d::Zero();

    Pose() = default;
    Pose(const Eigen::Matrix3d &R, const Eigen::Vector3d &t) : R(R), t(t) {}

    Eigen::Vector3d apply(const Eigen::Vector3d &X) const { return R * X + t; }
    Pose inverse() const { return {R.transpose(), -R.transpose() * t}; }
    // (this * other)(X) = this(other(X))
    Pose compose(const Pose &other) const { return {R * other.R, R * other.t + t}; }

    bool is_valid(double tol = 1e-9) const;
};

// Matched keypoints with optional per-view depths.
struct Correspondence {
    Eigen::Vector2d x1 = Eigen::Vector2d::Zero();
    Eigen::Vector2d x2 = Eigen::Vector2d::Zero();
    std::optional<double> d1;
    std::optional<double> d2;

    bool has_depth() const { return d1.has_value() && d2.has_value(); }
};

// Relative pose together with the depth-scale ratio between views: a point
// lifted with image-2 depth d2 sits at sigma * d2 in the metric of image 1.
struct ScaledPose {
    Pose pose;
    double sigma = 1.0;
};

struct EssentialMatrix {
    Eigen::Matrix3d E = Eigen::Matrix3d::Zero();
};

// Depths of a triangulated point in both camera frames.
struct DepthPair {
    double d1 = 0.0;
    double d2 = 0.0;
};

inline Eigen::Matrix3d skew(const Eigen::Vector3d &v) {
    Eigen::Matrix3d S;
    S << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
    return S;
}

// Rotation exp([w]x) from an axis-angle vector.
Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d &w);

} // namespace mdepose
