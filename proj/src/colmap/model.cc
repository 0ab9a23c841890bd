#include "mdepose/colmap/model.h"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <set>

#include "mdepose/util/error.h"

namespace mdepose::colmap {

std::string_view camera_model_name(CameraModelId id) {
    switch (id) {
    case CameraModelId::kSimplePinhole:
        return "SIMPLE_PINHOLE";
    case CameraModelId::kPinhole:
        return "PINHOLE";
    case CameraModelId::kSimpleRadial:
        return "SIMPLE_RADIAL";
    }
    return "UNKNOWN";
}

int camera_model_num_params(CameraModelId id) {
    switch (id) {
    case CameraModelId::kSimplePinhole:
        return 3;
    case CameraModelId::kPinhole:
        return 4;
    case CameraModelId::kSimpleRadial:
        return 4;
    }
    return 0;
}

CameraIntrinsics Camera::intrinsics() const {
    if (static_cast<int>(params.size()) != camera_model_num_params(model_id))
        throw Error(ErrorCode::kInvalidArgument, "camera " + std::to_string(camera_id) + " has " +
                                                     std::to_string(params.size()) + " params for model " +
                                                     std::string(camera_model_name(model_id)));
    CameraIntrinsics K;
    K.width = static_cast<int>(width);
    K.height = static_cast<int>(height);
    if (model_id == CameraModelId::kPinhole) {
        K.fx = params[0];
        K.fy = params[1];
        K.cx = params[2];
        K.cy = params[3];
    } else {
        // SIMPLE_PINHOLE: f, cx, cy; SIMPLE_RADIAL: f, cx, cy, k
        K.fx = K.fy = params[0];
        K.cx = params[1];
        K.cy = params[2];
    }
    return K;
}

Eigen::Matrix3d quaternion_to_rotation(const Eigen::Vector4d &qvec) {
    Eigen::Quaterniond q(qvec(0), qvec(1), qvec(2), qvec(3));
    q.normalize();
    return q.toRotationMatrix();
}

Eigen::Vector4d rotation_to_quaternion(const Eigen::Matrix3d &R) {
    Eigen::Quaterniond q(R);
    q.normalize();
    Eigen::Vector4d v(q.w(), q.x(), q.y(), q.z());
    if (v(0) < 0.0)
        v = -v;
    return v;
}

Pose Image::world_to_camera() const { return {quaternion_to_rotation(qvec), tvec}; }

void SfmModel::validate(const std::string &source) const {
    for (const auto &[id, image] : images) {
        if (!cameras.count(image.camera_id))
            throw FormatError(source, "image " + std::to_string(id) + " references missing camera " +
                                          std::to_string(image.camera_id));
        for (std::size_t k = 0; k < image.points2D.size(); ++k) {
            const point3D_t pid = image.points2D[k].point3D_id;
            if (pid == kInvalidPoint3DId)
                continue;
            auto it = points3D.find(pid);
            if (it == points3D.end())
                throw FormatError(source, "image " + std::to_string(id) + " observes missing point " +
                                              std::to_string(pid));
            const auto &track = it->second.track;
            const bool listed = std::any_of(track.begin(), track.end(), [&](const TrackElement &e) {
                return e.image_id == id && e.point2D_idx == k;
            });
            if (!listed)
                throw FormatError(source, "point " + std::to_string(pid) + " track lacks observation (" +
                                              std::to_string(id) + ", " + std::to_string(k) + ")");
        }
    }
    for (const auto &[pid, point] : points3D) {
        for (const auto &e : point.track) {
            auto it = images.find(e.image_id);
            if (it == images.end())
                throw FormatError(source, "point " + std::to_string(pid) + " track references missing image " +
                                              std::to_string(e.image_id));
            const auto &pts = it->second.points2D;
            if (e.point2D_idx >= pts.size() || pts[e.point2D_idx].point3D_id != pid)
                throw FormatError(source, "point " + std::to_string(pid) + " track entry (" +
                                              std::to_string(e.image_id) + ", " + std::to_string(e.point2D_idx) +
                                              ") disagrees with the image observations");
        }
    }
}

const Image &SfmModel::image(image_t id) const {
    auto it = images.find(id);
    if (it == images.end())
        throw Error(ErrorCode::kMissingImage, "image " + std::to_string(id));
    return it->second;
}

CameraIntrinsics SfmModel::intrinsics_of(image_t id) const {
    const Image &img = image(id);
    auto it = cameras.find(img.camera_id);
    if (it == cameras.end())
        throw Error(ErrorCode::kMissingImage, "camera " + std::to_string(img.camera_id) + " of image " +
                                                  std::to_string(id));
    return it->second.intrinsics();
}

Pose gt_relative_pose(const SfmModel &model, image_t id1, image_t id2) {
    const Pose p1 = model.image(id1).world_to_camera();
    const Pose p2 = model.image(id2).world_to_camera();
    const Eigen::Matrix3d R = p2.R * p1.R.transpose();
    return {R, p2.t - R * p1.t};
}

CovisibilityMap covisibility(const SfmModel &model) {
    std::map<image_t, std::size_t> counts;
    for (const auto &[pid, point] : model.points3D) {
        std::set<image_t> seen;
        for (const auto &e : point.track)
            seen.insert(e.image_id);
        for (image_t id : seen)
            ++counts[id];
    }

    std::map<std::pair<image_t, image_t>, std::size_t> shared;
    std::vector<image_t> seen;
    for (const auto &[pid, point] : model.points3D) {
        seen.clear();
        for (const auto &e : point.track)
            seen.push_back(e.image_id);
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        for (std::size_t a = 0; a < seen.size(); ++a)
            for (std::size_t b = a + 1; b < seen.size(); ++b)
                ++shared[{seen[a], seen[b]}];
    }

    CovisibilityMap out;
    for (const auto &[key, n] : shared) {
        const std::size_t denom = std::min(counts[key.first], counts[key.second]);
        out[key] = static_cast<double>(n) / static_cast<double>(denom);
    }
    return out;
}

} // namespace mdepose::colmap
