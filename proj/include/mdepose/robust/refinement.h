#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "mdepose/geometry/types.h"
#include "mdepose/robust/estimator.h"

namespace mdepose {

using Vector7d = Eigen::Matrix<double, 7, 1>;
using Matrix7d = Eigen::Matrix<double, 7, 7>;

// Robustified least-squares objective over a fixed set of correspondences.
// All terms are in pixels^2: the Sampson distance is scaled by the mean focal
// length of image 1, the transfer errors are pixel distances. The depth terms
// add the forward and backward transfer errors as separate blocks.
//
// Parameters are perturbations (w, dt, dlog_sigma) around a ScaledPose:
//   R <- exp([w]x) R,  t <- t + dt,  sigma <- sigma * exp(dlog_sigma).
class RefinementObjective {
  public:
    enum class Loss { kTruncated, kCauchy };

    RefinementObjective(std::span<const Correspondence> corrs, ResidualKind kind, Loss loss,
                        double sampson_threshold_px, double reproj_threshold_px, const CameraIntrinsics &K1,
                        const CameraIntrinsics &K2);

    double cost(const ScaledPose &sp) const;

    // Gauss-Newton system: H = sum rho' * 2 J^T J, g = sum rho' * 2 J^T r,
    // g being the exact gradient of cost() at zero perturbation.
    double normal_equations(const ScaledPose &sp, Matrix7d *H, Vector7d *g) const;

    Vector7d gradient(const ScaledPose &sp) const;

    bool depends_on_sigma() const { return kind_ != ResidualKind::kSampson; }

  private:
    struct Point {
        Eigen::Vector2d x1, x2;
        Eigen::Vector3d q1, q2; // normalized homogeneous
        double d1 = 0.0, d2 = 0.0;
    };

    // rho(s) and rho'(s) of a squared residual s for the threshold tau.
    void robustify(double s, double tau, double *rho, double *drho) const;

    std::vector<Point> points_;
    ResidualKind kind_;
    Loss loss_;
    double sampson_tau_;
    double reproj_tau_;
    double focal_;
    CameraIntrinsics K1_, K2_;
};

ScaledPose retract(const ScaledPose &sp, const Vector7d &delta);

struct LevenbergMarquardtOptions {
    int max_iterations = 25;
    bool estimate_sigma = true;
    // Rescale t to unit norm after every accepted step (scale-free models).
    bool normalize_translation = false;
};

struct LevenbergMarquardtSummary {
    double initial_cost = 0.0;
    double final_cost = 0.0;
    int iterations = 0;
    int accepted_steps = 0;
};

ScaledPose levenberg_marquardt(const RefinementObjective &objective, const ScaledPose &initial,
                               const LevenbergMarquardtOptions &options, LevenbergMarquardtSummary *summary = nullptr);

} // namespace mdepose
