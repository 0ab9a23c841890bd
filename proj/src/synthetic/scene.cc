#include "mdepose/synthetic/scene.h"

#include <cmath>
#include <numbers>
#include <numeric>

#include "mdepose/util/bytes.h"
#include "mdepose/util/error.h"

namespace mdepose::synthetic {

namespace {

Eigen::Vector3d random_unit(Rng &rng) {
    while (true) {
        Eigen::Vector3d v(rng.normal(), rng.normal(), rng.normal());
        const double n = v.norm();
        if (n > 1e-6)
            return v / n;
    }
}

bool inside(const CameraIntrinsics &K, const Eigen::Vector2d &x) {
    return x.x() >= 0.0 && x.x() < K.width && x.y() >= 0.0 && x.y() < K.height;
}

} // namespace

std::string depth_noise_name(const DepthNoise &noise) {
    switch (noise.kind) {
    case DepthNoise::Kind::kNone:
        return "none";
    case DepthNoise::Kind::kLogNormal:
        return "lognormal(" + format_double(noise.sigma) + ")";
    case DepthNoise::Kind::kGlobalScale:
        return "global-scale(" + format_double(noise.scale) + ")";
    case DepthNoise::Kind::kAffine:
        return "affine(" + format_double(noise.scale) + "," + format_double(noise.shift) + ")";
    }
    return "none";
}

void SceneSpec::validate() const {
    auto fail = [](const std::string &msg) { throw Error(ErrorCode::kSpecError, msg); };
    if (n_points == 0)
        fail("n_points must be positive");
    if (!(z_min > 0.0) || !(z_max > z_min) || !std::isfinite(z_max))
        fail("need 0 < z_min < z_max");
    if (!(outlier_fraction >= 0.0 && outlier_fraction < 1.0))
        fail("outlier fraction must be in [0, 1)");
    if (!(keypoint_noise_px >= 0.0) || !std::isfinite(keypoint_noise_px))
        fail("keypoint noise must be >= 0");
    if (!std::isfinite(rotation_deg) || !(baseline >= 0.0) || !std::isfinite(baseline))
        fail("rotation and baseline must be finite, baseline >= 0");
    if (!intrinsics.is_valid())
        fail("invalid intrinsics");
    switch (depth_noise.kind) {
    case DepthNoise::Kind::kNone:
        break;
    case DepthNoise::Kind::kLogNormal:
        if (!(depth_noise.sigma >= 0.0) || !std::isfinite(depth_noise.sigma))
            fail("lognormal sigma must be >= 0");
        break;
    case DepthNoise::Kind::kGlobalScale:
    case DepthNoise::Kind::kAffine:
        if (!(depth_noise.scale > 0.0) || !std::isfinite(depth_noise.scale) || !std::isfinite(depth_noise.shift))
            fail("depth noise scale must be > 0");
        break;
    }
}

std::size_t SyntheticPair::num_outliers() const {
    return static_cast<std::size_t>(std::accumulate(outlier_mask.begin(), outlier_mask.end(), 0));
}

void apply_depth_noise(std::vector<Correspondence> &corrs, const DepthNoise &noise, Rng &rng) {
    for (auto &c : corrs) {
        if (!c.has_depth())
            continue;
        switch (noise.kind) {
        case DepthNoise::Kind::kNone:
            break;
        case DepthNoise::Kind::kLogNormal:
            *c.d1 *= std::exp(noise.sigma * rng.normal());
            *c.d2 *= std::exp(noise.sigma * rng.normal());
            break;
        case DepthNoise::Kind::kGlobalScale:
            *c.d2 *= noise.scale;
            break;
        case DepthNoise::Kind::kAffine:
            *c.d2 = noise.scale * *c.d2 + noise.shift;
            break;
        }
    }
}

SyntheticPair generate(const SceneSpec &spec) {
    spec.validate();
    Rng rng(spec.seed);
    const CameraIntrinsics &K = spec.intrinsics;

    SyntheticPair out;
    out.K1 = out.K2 = K;
    const Eigen::Vector3d axis = random_unit(rng);
    const Eigen::Matrix3d R = rotation_from_axis_angle(axis * (spec.rotation_deg * std::numbers::pi / 180.0));
    const Eigen::Vector3d center2 = spec.baseline * random_unit(rng);
    out.gt_pose = Pose(R, -R * center2);

    const std::size_t n = spec.n_points;
    std::vector<Eigen::Vector3d> X1;
    X1.reserve(n);
    for (std::size_t attempt = 0; attempt < 10 * n && X1.size() < n; ++attempt) {
        const double u = rng.uniform(0.0, K.width);
        const double v = rng.uniform(0.0, K.height);
        const double z = rng.uniform(spec.z_min, spec.z_max);
        const Eigen::Vector3d X(z * (u - K.cx) / K.fx, z * (v - K.cy) / K.fy, z);
        const Eigen::Vector3d X2 = out.gt_pose.apply(X);
        if (X2.z() <= 1e-9 || !inside(K, K.project(X2)))
            continue;
        X1.push_back(X);
    }
    if (X1.size() < n)
        throw Error(ErrorCode::kSpecError, "only " + std::to_string(X1.size()) + " of " + std::to_string(n) +
                                               " points are visible in both views");

    out.correspondences.resize(n);
    out.gt_d1.resize(n);
    out.gt_d2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d X2 = out.gt_pose.apply(X1[i]);
        auto &c = out.correspondences[i];
        c.x1 = K.project(X1[i]);
        c.x2 = K.project(X2);
        out.gt_d1[i] = X1[i].z();
        out.gt_d2[i] = X2.z();
        c.d1 = out.gt_d1[i];
        c.d2 = out.gt_d2[i];
    }

    if (spec.keypoint_noise_px > 0.0) {
        for (auto &c : out.correspondences) {
            c.x1.x() += spec.keypoint_noise_px * rng.normal();
            c.x1.y() += spec.keypoint_noise_px * rng.normal();
            c.x2.x() += spec.keypoint_noise_px * rng.normal();
            c.x2.y() += spec.keypoint_noise_px * rng.normal();
        }
    }

    out.outlier_mask.assign(n, 0);
    const auto n_out = static_cast<std::size_t>(std::llround(spec.outlier_fraction * static_cast<double>(n)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < n_out; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
        std::swap(order[i], order[j]);
        out.outlier_mask[order[i]] = 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!out.outlier_mask[i])
            continue;
        auto &c = out.correspondences[i];
        c.x1 = {rng.uniform(0.0, K.width), rng.uniform(0.0, K.height)};
        c.x2 = {rng.uniform(0.0, K.width), rng.uniform(0.0, K.height)};
        c.d1 = rng.uniform(spec.z_min, spec.z_max);
        c.d2 = rng.uniform(spec.z_min, spec.z_max);
        out.gt_d1[i] = *c.d1;
        out.gt_d2[i] = *c.d2;
    }

    apply_depth_noise(out.correspondences, spec.depth_noise, rng);
    return out;
}

} // namespace mdepose::synthetic
