#include "mdepose/robust/refinement.h"

#include <Eigen/Cholesky>
#include <array>
#include <cmath>

#include "mdepose/geometry/two_view.h"

namespace mdepose {

namespace {

constexpr double kMinDepth = 1e-9;
// Squared residuals are capped at this multiple of tau^2 under the Cauchy
// loss so that points crossing behind a camera keep a large finite cost.
constexpr double kCauchyCap = 1e12;

using Matrix27d = Eigen::Matrix<double, 2, 7>;
using Vector17d = Eigen::Matrix<double, 1, 7>;

Eigen::Matrix<double, 2, 3> projection_jacobian(const CameraIntrinsics &K, const Eigen::Vector3d &X) {
    const double iz = 1.0 / X.z();
    Eigen::Matrix<double, 2, 3> J;
    J << K.fx * iz, 0.0, -K.fx * X.x() * iz * iz, 0.0, K.fy * iz, -K.fy * X.y() * iz * iz;
    return J;
}

} // namespace

RefinementObjective::RefinementObjective(std::span<const Correspondence> corrs, ResidualKind kind, Loss loss,
                                         double sampson_threshold_px, double reproj_threshold_px,
                                         const CameraIntrinsics &K1, const CameraIntrinsics &K2)
    : kind_(kind), loss_(loss), sampson_tau_(sampson_threshold_px), reproj_tau_(reproj_threshold_px),
      focal_(K1.mean_focal()), K1_(K1), K2_(K2) {
    points_.reserve(corrs.size());
    for (const Correspondence &c : corrs) {
        Point p;
        p.x1 = c.x1;
        p.x2 = c.x2;
        const Eigen::Vector2d x1n = normalize_point(c.x1, K1);
        const Eigen::Vector2d x2n = normalize_point(c.x2, K2);
        p.q1 = Eigen::Vector3d(x1n.x(), x1n.y(), 1.0);
        p.q2 = Eigen::Vector3d(x2n.x(), x2n.y(), 1.0);
        p.d1 = c.d1.value_or(0.0);
        p.d2 = c.d2.value_or(0.0);
        points_.push_back(p);
    }
}

void RefinementObjective::robustify(double s, double tau, double *rho, double *drho) const {
    const double tau2 = tau * tau;
    if (loss_ == Loss::kTruncated) {
        if (std::isfinite(s) && s < tau2) {
            *rho = s;
            *drho = 1.0;
        } else {
            *rho = tau2;
            *drho = 0.0;
        }
        return;
    }
    if (!std::isfinite(s) || s > kCauchyCap * tau2) {
        *rho = tau2 * std::log1p(kCauchyCap);
        *drho = 0.0;
        return;
    }
    *rho = tau2 * std::log1p(s / tau2);
    *drho = 1.0 / (1.0 + s / tau2);
}

double RefinementObjective::cost(const ScaledPose &sp) const { return normal_equations(sp, nullptr, nullptr); }

Vector7d RefinementObjective::gradient(const ScaledPose &sp) const {
    Matrix7d H;
    Vector7d g;
    normal_equations(sp, &H, &g);
    return g;
}

double RefinementObjective::normal_equations(const ScaledPose &sp, Matrix7d *H, Vector7d *g) const {
    const bool want_derivatives = H != nullptr && g != nullptr;
    if (want_derivatives) {
        H->setZero();
        g->setZero();
    }

    const Eigen::Matrix3d &R = sp.pose.R;
    const Eigen::Vector3d &t = sp.pose.t;
    const bool use_sampson = kind_ != ResidualKind::kReprojection;
    const bool use_reproj = kind_ != ResidualKind::kSampson;

    Eigen::Matrix3d E = Eigen::Matrix3d::Zero();
    std::array<Eigen::Matrix3d, 6> dE;
    if (use_sampson) {
        const Eigen::Matrix3d tx = skew(t);
        E = tx * R;
        for (int k = 0; k < 3; ++k) {
            const Eigen::Matrix3d ek = skew(Eigen::Vector3d::Unit(k));
            dE[k] = tx * ek * R;
            dE[3 + k] = ek * R;
        }
    }

    double total = 0.0;
    double rho = 0.0, drho = 0.0;
    for (const Point &p : points_) {
        if (use_sampson) {
            const Eigen::Vector3d Eq1 = E * p.q1;
            const Eigen::Vector3d Etq2 = E.transpose() * p.q2;
            const double C = p.q2.dot(Eq1);
            const double D = Eq1.head<2>().squaredNorm() + Etq2.head<2>().squaredNorm();
            const bool finite = D >= 1e-24;
            const double r = finite ? focal_ * C / std::sqrt(D) : 0.0;
            robustify(finite ? r * r : std::numeric_limits<double>::infinity(), sampson_tau_, &rho, &drho);
            total += rho;
            if (want_derivatives && drho > 0.0) {
                Vector17d J = Vector17d::Zero();
                const double sqrtD = std::sqrt(D);
                for (int k = 0; k < 6; ++k) {
                    const Eigen::Vector3d dEq1 = dE[k] * p.q1;
                    const Eigen::Vector3d dEtq2 = dE[k].transpose() * p.q2;
                    const double dC = p.q2.dot(dEq1);
                    const double dD = 2.0 * (Eq1(0) * dEq1(0) + Eq1(1) * dEq1(1) + Etq2(0) * dEtq2(0) +
                                             Etq2(1) * dEtq2(1));
                    J(k) = focal_ * (dC / sqrtD - 0.5 * C * dD / (D * sqrtD));
                }
                *H += 2.0 * drho * J.transpose() * J;
                *g += 2.0 * drho * r * J.transpose();
            }
        }

        if (use_reproj) {
            // Forward: lift with d1, transfer into image 2.
            const Eigen::Vector3d X1 = p.d1 * p.q1;
            const Eigen::Vector3d RX1 = R * X1;
            const Eigen::Vector3d X2hat = RX1 + t;
            if (X2hat.z() > kMinDepth) {
                const Eigen::Vector2d e = p.x2 - K2_.project(X2hat);
                robustify(e.squaredNorm(), reproj_tau_, &rho, &drho);
                total += rho;
                if (want_derivatives && drho > 0.0) {
                    const Eigen::Matrix<double, 2, 3> Jp = projection_jacobian(K2_, X2hat);
                    Matrix27d J = Matrix27d::Zero();
                    J.leftCols<3>() = Jp * skew(RX1);
                    J.middleCols<3>(3) = -Jp;
                    *H += 2.0 * drho * J.transpose() * J;
                    *g += 2.0 * drho * J.transpose() * e;
                }
            } else {
                robustify(std::numeric_limits<double>::infinity(), reproj_tau_, &rho, &drho);
                total += rho;
            }

            // Backward: lift with sigma * d2, transfer into image 1.
            const Eigen::Vector3d X2 = sp.sigma * p.d2 * p.q2;
            const Eigen::Vector3d X1hat = R.transpose() * (X2 - t);
            if (X1hat.z() > kMinDepth) {
                const Eigen::Vector2d e = p.x1 - K1_.project(X1hat);
                robustify(e.squaredNorm(), reproj_tau_, &rho, &drho);
                total += rho;
                if (want_derivatives && drho > 0.0) {
                    const Eigen::Matrix<double, 2, 3> Jp = projection_jacobian(K1_, X1hat);
                    Matrix27d J;
                    J.leftCols<3>() = -Jp * R.transpose() * skew(X2 - t);
                    J.middleCols<3>(3) = Jp * R.transpose();
                    J.col(6) = -Jp * (R.transpose() * X2);
                    *H += 2.0 * drho * J.transpose() * J;
                    *g += 2.0 * drho * J.transpose() * e;
                }
            } else {
                robustify(std::numeric_limits<double>::infinity(), reproj_tau_, &rho, &drho);
                total += rho;
            }
        }
    }
    return total;
}

ScaledPose retract(const ScaledPose &sp, const Vector7d &delta) {
    ScaledPose out;
    out.pose.R = rotation_from_axis_angle(delta.head<3>()) * sp.pose.R;
    out.pose.t = sp.pose.t + delta.segment<3>(3);
    out.sigma = sp.sigma * std::exp(delta(6));
    return out;
}

ScaledPose levenberg_marquardt(const RefinementObjective &objective, const ScaledPose &initial,
                               const LevenbergMarquardtOptions &options, LevenbergMarquardtSummary *summary) {
    ScaledPose x = initial;
    Matrix7d H;
    Vector7d g;
    double cost = objective.normal_equations(x, &H, &g);
    const bool fix_sigma = !options.estimate_sigma || !objective.depends_on_sigma();

    LevenbergMarquardtSummary stats;
    stats.initial_cost = cost;
    double lambda = 1e-3;
    bool recompute = false;
    while (stats.iterations < options.max_iterations) {
        if (recompute) {
            objective.normal_equations(x, &H, &g);
            recompute = false;
        }
        if (fix_sigma) {
            H.row(6).setZero();
            H.col(6).setZero();
            H(6, 6) = 1.0;
            g(6) = 0.0;
        }
        if (!g.allFinite() || g.cwiseAbs().maxCoeff() < 1e-12)
            break;

        Matrix7d Hd = H;
        Hd.diagonal().array() += lambda;
        const Vector7d delta = Hd.ldlt().solve(-g);
        ++stats.iterations;
        if (!delta.allFinite())
            break;

        ScaledPose candidate = retract(x, delta);
        if (options.normalize_translation) {
            const double n = candidate.pose.t.norm();
            if (n > 0.0)
                candidate.pose.t /= n;
        }
        const double new_cost = objective.cost(candidate);
        if (new_cost < cost) {
            x = candidate;
            cost = new_cost;
            lambda = std::max(lambda / 10.0, 1e-10);
            ++stats.accepted_steps;
            recompute = true;
            if (delta.norm() < 1e-12)
                break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12)
                break;
        }
    }
    stats.final_cost = cost;
    if (summary != nullptr)
        *summary = stats;
    return x;
}

} // namespace mdepose
