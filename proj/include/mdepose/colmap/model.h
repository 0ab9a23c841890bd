#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mdepose/geometry/types.h"

namespace mdepose::colmap {

using camera_t = std::uint32_t;
using image_t = std::uint32_t;
using point3D_t = std::uint64_t;

inline constexpr point3D_t kInvalidPoint3DId = std::numeric_limits<point3D_t>::max();

// COLMAP camera model ids understood by the reader. Anything else is
// rejected with UnsupportedCameraModel.
enum class CameraModelId : int {
    kSimplePinhole = 0,
    kPinhole = 1,
    kSimpleRadial = 2,
};

struct Camera {
    camera_t camera_id = 0;
    CameraModelId model_id = CameraModelId::kPinhole;
    std::uint64_t width = 0;
    std::uint64_t height = 0;
    std::vector<double> params;

    // Radial terms of SIMPLE_RADIAL are dropped: inputs are assumed
    // undistorted.
    CameraIntrinsics intrinsics() const;

    bool operator==(const Camera &) const = default;
};

struct Point2D {
    Eigen::Vector2d xy = Eigen::Vector2d::Zero();
    point3D_t point3D_id = kInvalidPoint3DId;

    bool operator==(const Point2D &) const = default;
};

struct Image {
    image_t image_id = 0;
    // World-to-camera rotation as (qw, qx, qy, qz), stored as read.
    Eigen::Vector4d qvec = Eigen::Vector4d(1.0, 0.0, 0.0, 0.0);
    Eigen::Vector3d tvec = Eigen::Vector3d::Zero();
    camera_t camera_id = 0;
    std::string name;
    std::vector<Point2D> points2D;

    // Absolute pose X_cam = R * X_world + t with R from the normalized qvec.
    Pose world_to_camera() const;

    bool operator==(const Image &) const = default;
};

struct TrackElement {
    image_t image_id = 0;
    std::uint32_t point2D_idx = 0;

    bool operator==(const TrackElement &) const = default;
};

struct Point3D {
    point3D_t point3D_id = 0;
    Eigen::Vector3d xyz = Eigen::Vector3d::Zero();
    std::array<std::uint8_t, 3> color{};
    double error = 0.0;
    std::vector<TrackElement> track;

    bool operator==(const Point3D &) const = default;
};

struct SfmModel {
    std::map<camera_t, Camera> cameras;
    std::map<image_t, Image> images;
    std::map<point3D_t, Point3D> points3D;

    // Throws FormatError when a referenced camera/image/observation is
    // missing or an image observation disagrees with the point tracks.
    void validate(const std::string &source) const;

    const Image &image(image_t id) const;
    CameraIntrinsics intrinsics_of(image_t id) const;

    bool operator==(const SfmModel &) const = default;
};

std::string_view camera_model_name(CameraModelId id);
int camera_model_num_params(CameraModelId id);

Eigen::Matrix3d quaternion_to_rotation(const Eigen::Vector4d &qvec);
// Unit quaternion (w, x, y, z) with w >= 0.
Eigen::Vector4d rotation_to_quaternion(const Eigen::Matrix3d &R);

// Relative pose mapping camera-id1 coordinates into camera-id2 coordinates:
// R = R2 R1^T, t = t2 - R t1. Throws Error(kMissingImage).
Pose gt_relative_pose(const SfmModel &model, image_t id1, image_t id2);

// Overlap of every image pair sharing at least one 3D point:
// |P_i & P_j| / min(|P_i|, |P_j|), with P_i the distinct points whose track
// contains image i. Keys are canonical (id1 < id2).
using CovisibilityMap = std::map<std::pair<image_t, image_t>, double>;
CovisibilityMap covisibility(const SfmModel &model);

} // namespace mdepose::colmap
