#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdepose/geometry/types.h"
#include "mdepose/util/random.h"

namespace mdepose::synthetic {

struct DepthNoise {
    enum class Kind { kNone, kLogNormal, kGlobalScale, kAffine };

    Kind kind = Kind::kNone;
    // kLogNormal: d <- d * exp(sigma * N(0,1)) independently per view.
    double sigma = 0.0;
    // kGlobalScale: d2 <- scale * d2. kAffine: d2 <- scale * d2 + shift.
    double scale = 1.0;
    double shift = 0.0;

    static DepthNoise none() { return {}; }
    static DepthNoise lognormal(double sigma) { return {Kind::kLogNormal, sigma, 1.0, 0.0}; }
    static DepthNoise global_scale(double s) { return {Kind::kGlobalScale, 0.0, s, 0.0}; }
    static DepthNoise affine(double a, double b) { return {Kind::kAffine, 0.0, a, b}; }
};

std::string depth_noise_name(const DepthNoise &noise);

struct SceneSpec {
    std::size_t n_points = 200;
    double z_min = 2.0;
    double z_max = 10.0;
    double rotation_deg = 15.0;
    double baseline = 1.0;
    double keypoint_noise_px = 0.0;
    double outlier_fraction = 0.0;
    DepthNoise depth_noise;
    CameraIntrinsics intrinsics{600.0, 600.0, 320.0, 240.0, 640, 480};
    std::uint64_t seed = 0;

    // Throws Error(kSpecError).
    void validate() const;
};

struct SyntheticPair {
    std::vector<Correspondence> correspondences;
    // X2 = R X1 + t; camera 1 sits at the world origin.
    Pose gt_pose;
    std::vector<double> gt_d1;
    std::vector<double> gt_d2;
    CameraIntrinsics K1;
    CameraIntrinsics K2;
    std::vector<std::uint8_t> outlier_mask;

    std::size_t num_outliers() const;
};

// Throws Error(kSpecError) when fewer than n_points points visible in both
// views are found within 10 * n_points draws.
SyntheticPair generate(const SceneSpec &spec);

// Applies `noise` to the depths stored in the correspondences.
void apply_depth_noise(std::vector<Correspondence> &corrs, const DepthNoise &noise, Rng &rng);

} // namespace mdepose::synthetic
