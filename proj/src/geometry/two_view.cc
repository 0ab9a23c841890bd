#include "mdepose/geometry/two_view.h"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <numbers>

namespace mdepose {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinDepth = 1e-9;

} // namespace

bool CameraIntrinsics::is_valid() const {
    return fx > 0.0 && fy > 0.0 && width > 0 && height > 0 && cx >= 0.0 && cx < width && cy >= 0.0 &&
           cy < height && std::isfinite(fx) && std::isfinite(fy);
}

double CameraIntrinsics::mean_focal() const { return std::sqrt(fx * fy); }

Eigen::Matrix3d CameraIntrinsics::matrix() const {
    Eigen::Matrix3d K;
    K << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
    return K;
}

bool Pose::is_valid(double tol) const {
    if (!R.allFinite() || !t.allFinite())
        return false;
    const double orth = (R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    return orth <= tol && std::abs(R.determinant() - 1.0) <= tol;
}

Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d &w) {
    const double angle = w.norm();
    if (angle == 0.0)
        return Eigen::Matrix3d::Identity();
    return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

Eigen::Vector2d normalize_point(const Eigen::Vector2d &x, const CameraIntrinsics &K) {
    return {(x.x() - K.cx) / K.fx, (x.y() - K.cy) / K.fy};
}

Result<EssentialMatrix> essential_from_pose(const Pose &pose) {
    const double n = pose.t.norm();
    if (!(n >= 1e-12))
        return Error(ErrorCode::kZeroBaseline, "translation norm below 1e-12");
    EssentialMatrix E;
    E.E = skew(pose.t) * pose.R;
    E.E /= E.E.norm();
    return E;
}

double sampson_error_sq(const EssentialMatrix &E, const Eigen::Vector2d &x1n, const Eigen::Vector2d &x2n) {
    const Eigen::Vector3d q1(x1n.x(), x1n.y(), 1.0);
    const Eigen::Vector3d q2(x2n.x(), x2n.y(), 1.0);
    const Eigen::Vector3d Eq1 = E.E * q1;
    const Eigen::Vector3d Etq2 = E.E.transpose() * q2;
    const double C = q2.dot(Eq1);
    const double denom = Eq1.head<2>().squaredNorm() + Etq2.head<2>().squaredNorm();
    if (!(denom >= 1e-24))
        return kInf;
    return C * C / denom;
}

TransferErrors transfer_errors(const ScaledPose &sp, const Correspondence &c, const CameraIntrinsics &K1,
                               const CameraIntrinsics &K2) {
    const Pose &P = sp.pose;
    TransferErrors err;

    const Eigen::Vector2d x1n = normalize_point(c.x1, K1);
    const Eigen::Vector3d X1 = *c.d1 * Eigen::Vector3d(x1n.x(), x1n.y(), 1.0);
    const Eigen::Vector3d X2hat = P.R * X1 + P.t;
    err.forward = X2hat.z() > kMinDepth ? (c.x2 - K2.project(X2hat)).norm() : kInf;

    const Eigen::Vector2d x2n = normalize_point(c.x2, K2);
    const Eigen::Vector3d X2 = sp.sigma * *c.d2 * Eigen::Vector3d(x2n.x(), x2n.y(), 1.0);
    const Eigen::Vector3d X1hat = P.R.transpose() * (X2 - P.t);
    err.backward = X1hat.z() > kMinDepth ? (c.x1 - K1.project(X1hat)).norm() : kInf;

    if (!std::isfinite(err.forward))
        err.forward = kInf;
    if (!std::isfinite(err.backward))
        err.backward = kInf;
    return err;
}

double sym_reprojection_error(const ScaledPose &sp, const Correspondence &c, const CameraIntrinsics &K1,
                              const CameraIntrinsics &K2) {
    const TransferErrors e = transfer_errors(sp, c, K1, K2);
    return std::max(e.forward, e.backward);
}

Result<DepthPair> triangulate(const Pose &pose, const Eigen::Vector2d &x1n, const Eigen::Vector2d &x2n) {
    if (!(pose.t.norm() >= 1e-12))
        return Error(ErrorCode::kZeroBaseline, "translation norm below 1e-12");

    const Eigen::Vector3d ray1 = pose.R * Eigen::Vector3d(x1n.x(), x1n.y(), 1.0);
    const Eigen::Vector3d ray2(x2n.x(), x2n.y(), 1.0);
    const double sin_angle = ray1.cross(ray2).norm() / (ray1.norm() * ray2.norm());
    if (!(sin_angle >= 1e-9))
        return Error(ErrorCode::kDegenerate, "viewing rays are parallel");

    Eigen::Matrix<double, 3, 4> P2;
    P2.leftCols<3>() = pose.R;
    P2.col(3) = pose.t;

    Eigen::Matrix4d A;
    A.row(0) << -1.0, 0.0, x1n.x(), 0.0;
    A.row(1) << 0.0, -1.0, x1n.y(), 0.0;
    A.row(2) = x2n.x() * P2.row(2) - P2.row(0);
    A.row(3) = x2n.y() * P2.row(2) - P2.row(1);

    const Eigen::JacobiSVD<Eigen::Matrix4d> svd(A, Eigen::ComputeFullV);
    const Eigen::Vector4d Xh = svd.matrixV().col(3);
    if (!(std::abs(Xh(3)) > 1e-14 * Xh.head<3>().norm()))
        return Error(ErrorCode::kDegenerate, "triangulated point at infinity");

    const Eigen::Vector3d X = Xh.head<3>() / Xh(3);
    DepthPair depths{X.z(), pose.R.row(2).dot(X) + pose.t.z()};
    if (!(depths.d1 > 0.0) || !(depths.d2 > 0.0))
        return Error(ErrorCode::kNegativeDepth, "point behind a camera");
    return depths;
}

double rotation_error(const Eigen::Matrix3d &R_est, const Eigen::Matrix3d &R_gt) {
    // atan2 form of arccos((tr - 1) / 2).
    const Eigen::Matrix3d D = R_est.transpose() * R_gt;
    const double c = std::clamp((D.trace() - 1.0) / 2.0, -1.0, 1.0);
    const Eigen::Vector3d v(D(2, 1) - D(1, 2), D(0, 2) - D(2, 0), D(1, 0) - D(0, 1));
    const double s = 0.5 * v.norm();
    return std::atan2(s, c) * kRadToDeg;
}

Result<double> translation_error(const Eigen::Vector3d &t_est, const Eigen::Vector3d &t_gt) {
    const double n_est = t_est.norm();
    const double n_gt = t_gt.norm();
    if (!(n_est >= 1e-12) || !(n_gt >= 1e-12))
        return Error(ErrorCode::kUndefinedDirection, "translation norm below 1e-12");
    const Eigen::Vector3d a = t_est / n_est;
    const Eigen::Vector3d b = t_gt / n_gt;
    const double c = std::clamp(a.dot(b), -1.0, 1.0);
    const double s = a.cross(b).norm();
    return std::atan2(s, c) * kRadToDeg;
}

} // namespace mdepose
