#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>

#include "mdepose/solvers/minimal.h"

namespace mdepose {

namespace {

double triangle_area(const Eigen::Vector3d &a, const Eigen::Vector3d &b, const Eigen::Vector3d &c) {
    return 0.5 * (b - a).cross(c - a).norm();
}

// Depths of a match along both rays, least squares in d1 * R q1 + t = d2 * q2.
bool in_front(const Pose &pose, const Correspondence &c) {
    const Eigen::Vector3d a = pose.R * Eigen::Vector3d(c.x1.x(), c.x1.y(), 1.0);
    const Eigen::Vector3d b(c.x2.x(), c.x2.y(), 1.0);
    const double aa = a.dot(a), ab = a.dot(b), bb = b.dot(b);
    const double at = a.dot(pose.t), bt = b.dot(pose.t);
    const double det = aa * bb - ab * ab;
    if (!(std::abs(det) > 1e-14 * aa * bb))
        return false;
    const double d1 = (-at * bb + ab * bt) / det;
    const double d2 = (aa * bt - ab * at) / det;
    return d1 > 0.0 && d2 > 0.0;
}

class Essential5ptSolver final : public MinimalSolver {
  public:
    std::size_t sample_size() const override { return 5; }
    bool uses_depth() const override { return false; }
    Result<std::vector<ScaledPose>> solve(std::span<const Correspondence> sample) const override {
        auto essentials = solve_essential_5pt(sample.first<5>());
        if (!essentials)
            return essentials.error();
        std::vector<ScaledPose> poses;
        poses.reserve(essentials->size());
        for (const EssentialMatrix &E : *essentials) {
            auto pose = decompose_essential(E, sample);
            if (pose)
                poses.push_back({*pose, 1.0});
        }
        return poses;
    }
};

class Depth3ptSolver final : public MinimalSolver {
  public:
    std::size_t sample_size() const override { return 3; }
    bool uses_depth() const override { return true; }
    Result<std::vector<ScaledPose>> solve(std::span<const Correspondence> sample) const override {
        auto sp = solve_relpose_scale_depth(sample.first<3>());
        if (!sp)
            return sp.error();
        return std::vector<ScaledPose>{*sp};
    }
};

} // namespace

Result<ScaledPose> solve_relpose_scale_depth(std::span<const Correspondence, 3> sample) {
    std::array<Eigen::Vector3d, 3> A, B;
    for (int i = 0; i < 3; ++i) {
        const Correspondence &c = sample[i];
        if (!c.has_depth())
            return Error(ErrorCode::kInvalidArgument, "depth solver requires d1 and d2");
        A[i] = *c.d1 * Eigen::Vector3d(c.x1.x(), c.x1.y(), 1.0);
        B[i] = *c.d2 * Eigen::Vector3d(c.x2.x(), c.x2.y(), 1.0);
    }
    if (!(triangle_area(A[0], A[1], A[2]) >= 1e-12) || !(triangle_area(B[0], B[1], B[2]) >= 1e-12))
        return Error(ErrorCode::kCollinear, "lifted points are collinear");

    const Eigen::Vector3d mean_a = (A[0] + A[1] + A[2]) / 3.0;
    const Eigen::Vector3d mean_b = (B[0] + B[1] + B[2]) / 3.0;
    Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
    double norm_a = 0.0, norm_b = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Eigen::Vector3d a = A[i] - mean_a;
        const Eigen::Vector3d b = B[i] - mean_b;
        H += b * a.transpose();
        norm_a += a.squaredNorm();
        norm_b += b.squaredNorm();
    }

    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Matrix3d &U = svd.matrixU();
    const Eigen::Matrix3d &V = svd.matrixV();
    Eigen::Vector3d d(1.0, 1.0, (U * V.transpose()).determinant() < 0.0 ? -1.0 : 1.0);
    Eigen::Matrix3d R = U * d.asDiagonal() * V.transpose();

    if ((R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9) {
        const Eigen::JacobiSVD<Eigen::Matrix3d> re(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
        R = re.matrixU() * re.matrixV().transpose();
    }

    const double sigma = std::sqrt(norm_a / norm_b);
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        return Error(ErrorCode::kNonPositiveScale, "recovered depth scale is not positive");

    ScaledPose sp;
    sp.pose.R = R;
    sp.pose.t = sigma * mean_b - R * mean_a;
    sp.sigma = sigma;
    return sp;
}

Result<Pose> decompose_essential(const EssentialMatrix &E, std::span<const Correspondence> corrs) {
    if (corrs.empty())
        return Error(ErrorCode::kInvalidArgument, "no correspondences for cheirality test");

    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(E.E, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d U = svd.matrixU();
    Eigen::Matrix3d V = svd.matrixV();
    if (U.determinant() < 0.0)
        U = -U;
    if (V.determinant() < 0.0)
        V = -V;

    Eigen::Matrix3d W;
    W << 0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0;
    const Eigen::Matrix3d Ra = U * W * V.transpose();
    const Eigen::Matrix3d Rb = U * W.transpose() * V.transpose();
    const Eigen::Vector3d u3 = U.col(2).normalized();

    const std::array<Pose, 4> candidates = {Pose(Ra, u3), Pose(Ra, -u3), Pose(Rb, u3), Pose(Rb, -u3)};
    int best = -1;
    int best_count = 0;
    for (int k = 0; k < 4; ++k) {
        int count = 0;
        for (const Correspondence &c : corrs)
            count += in_front(candidates[k], c) ? 1 : 0;
        if (count > best_count) {
            best_count = count;
            best = k;
        }
    }
    if (best < 0)
        return Error(ErrorCode::kNoCheiralSolution, "no decomposition places any point in front of both cameras");
    return candidates[best];
}

std::unique_ptr<MinimalSolver> make_minimal_solver(MinimalSolverKind kind) {
    switch (kind) {
    case MinimalSolverKind::kEssential5pt:
        return std::make_unique<Essential5ptSolver>();
    case MinimalSolverKind::kDepth3pt:
        return std::make_unique<Depth3ptSolver>();
    }
    return nullptr;
}

} // namespace mdepose
