#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mdepose/geometry/types.h"
#include "mdepose/util/error.h"

namespace mdepose {

// All solvers take correspondences whose x1/x2 are already on the normalized
// image plane.

// Five-point essential matrix solver. Nullspace of the 5x9 epipolar system,
// ten cubic constraints reduced by Gauss-Jordan elimination, roots from the
// eigenvectors of the 10x10 action matrix for multiplication by x. Returns up
// to ten real solutions, each projected onto the essential manifold with unit
// Frobenius norm. Degenerate if the epipolar system has rank < 5 or the
// elimination template is singular.
Result<std::vector<EssentialMatrix>> solve_essential_5pt(std::span<const Correspondence, 5> sample);

// Scale-invariant calibrated solver from three depth-lifted matches:
// sigma * B_i = R * A_i + t with A_i = d1_i (x1_i, 1), B_i = d2_i (x2_i, 1).
// Closed form: Kabsch rotation on the centered triangles, sigma from the
// ratio of centered norms, t from the centroids. Errors: Collinear (triangle
// area < 1e-12 in either frame), NonPositiveScale.
Result<ScaledPose> solve_relpose_scale_depth(std::span<const Correspondence, 3> sample);

// Picks the decomposition of E (out of four) with the most correspondences
// triangulating in front of both cameras; ties go to the first in the order
// (Ua, +u3), (Ua, -u3), (Ub, +u3), (Ub, -u3). Returned t has unit norm.
Result<Pose> decompose_essential(const EssentialMatrix &E, std::span<const Correspondence> corrs);

// Residual of the cubic essential constraints (|det E| and the max-abs entry
// of 2 E E^T E - tr(E E^T) E) after Frobenius normalization.
struct EssentialConstraintResidual {
    double determinant = 0.0;
    double trace = 0.0;
};
EssentialConstraintResidual essential_constraint_residual(const Eigen::Matrix3d &E);

enum class MinimalSolverKind { kEssential5pt, kDepth3pt };

// Uniform solver interface used by the robust estimator. Essential-matrix
// solvers resolve their candidates to poses by cheirality on the sample.
// New minimal problems (affine depth, unknown focal) plug in here.
class MinimalSolver {
  public:
    virtual ~MinimalSolver() = default;
    virtual std::size_t sample_size() const = 0;
    virtual bool uses_depth() const = 0;
    virtual Result<std::vector<ScaledPose>> solve(std::span<const Correspondence> sample) const = 0;
};

std::unique_ptr<MinimalSolver> make_minimal_solver(MinimalSolverKind kind);

} // namespace mdepose
