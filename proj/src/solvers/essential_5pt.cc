#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <array>
#include <cmath>
#include <complex>

#include "mdepose/solvers/minimal.h"

namespace mdepose {

namespace {

// Polynomials in (x, y, z) of total degree <= 3. Column order puts the ten
// cubic monomials first so that Gauss-Jordan elimination expresses each of
// them in the quotient-ring basis {x^2, xy, xz, y^2, yz, z^2, x, y, z, 1}.
constexpr int kNumMonomials = 20;
constexpr std::array<std::array<int, 3>, kNumMonomials> kExponents = {{
    {3, 0, 0}, {2, 1, 0}, {2, 0, 1}, {1, 2, 0}, {1, 1, 1}, {1, 0, 2}, {0, 3, 0}, {0, 2, 1}, {0, 1, 2}, {0, 0, 3},
    {2, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 2, 0}, {0, 1, 1}, {0, 0, 2}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0},
}};

constexpr int monomial_index(int a, int b, int c) {
    for (int i = 0; i < kNumMonomials; ++i) {
        if (kExponents[i][0] == a && kExponents[i][1] == b && kExponents[i][2] == c)
            return i;
    }
    return -1;
}

struct ProductTable {
    std::array<std::array<int, kNumMonomials>, kNumMonomials> index{};
    constexpr ProductTable() {
        for (int i = 0; i < kNumMonomials; ++i) {
            for (int j = 0; j < kNumMonomials; ++j) {
                const int a = kExponents[i][0] + kExponents[j][0];
                const int b = kExponents[i][1] + kExponents[j][1];
                const int c = kExponents[i][2] + kExponents[j][2];
                index[i][j] = (a + b + c <= 3) ? monomial_index(a, b, c) : -1;
            }
        }
    }
};

constexpr ProductTable kProducts{};
constexpr int kX = monomial_index(1, 0, 0);
constexpr int kY = monomial_index(0, 1, 0);
constexpr int kZ = monomial_index(0, 0, 1);
constexpr int kOne = monomial_index(0, 0, 0);

using Poly = std::array<double, kNumMonomials>;

Poly mul(const Poly &p, const Poly &q) {
    Poly r{};
    for (int i = 0; i < kNumMonomials; ++i) {
        if (p[i] == 0.0)
            continue;
        for (int j = 0; j < kNumMonomials; ++j) {
            if (q[j] == 0.0)
                continue;
            r[kProducts.index[i][j]] += p[i] * q[j];
        }
    }
    return r;
}

Poly add(const Poly &p, const Poly &q) {
    Poly r;
    for (int i = 0; i < kNumMonomials; ++i)
        r[i] = p[i] + q[i];
    return r;
}

Poly sub(const Poly &p, const Poly &q) {
    Poly r;
    for (int i = 0; i < kNumMonomials; ++i)
        r[i] = p[i] - q[i];
    return r;
}

Poly scale(const Poly &p, double s) {
    Poly r;
    for (int i = 0; i < kNumMonomials; ++i)
        r[i] = s * p[i];
    return r;
}

using PolyMatrix = std::array<std::array<Poly, 3>, 3>;

Eigen::Matrix3d project_to_essential(const Eigen::Matrix3d &E) {
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(E, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Vector3d s(1.0, 1.0, 0.0);
    Eigen::Matrix3d P = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
    return P / P.norm();
}

} // namespace

EssentialConstraintResidual essential_constraint_residual(const Eigen::Matrix3d &E_in) {
    const Eigen::Matrix3d E = E_in / E_in.norm();
    const Eigen::Matrix3d EEt = E * E.transpose();
    const Eigen::Matrix3d T = 2.0 * EEt * E - EEt.trace() * E;
    return {std::abs(E.determinant()), T.cwiseAbs().maxCoeff()};
}

Result<std::vector<EssentialMatrix>> solve_essential_5pt(std::span<const Correspondence, 5> sample) {
    Eigen::Matrix<double, 5, 9> Q;
    for (int i = 0; i < 5; ++i) {
        const Eigen::Vector3d q1(sample[i].x1.x(), sample[i].x1.y(), 1.0);
        const Eigen::Vector3d q2(sample[i].x2.x(), sample[i].x2.y(), 1.0);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                Q(i, 3 * r + c) = q2(r) * q1(c);
    }
    if (!Q.allFinite())
        return Error(ErrorCode::kDegenerate, "non-finite sample");

    const Eigen::JacobiSVD<Eigen::Matrix<double, 5, 9>> svd(Q, Eigen::ComputeFullV);
    const auto &sv = svd.singularValues();
    if (!(sv(4) > 1e-10 * sv(0)))
        return Error(ErrorCode::kDegenerate, "epipolar system has rank < 5");

    // E = x * N0 + y * N1 + z * N2 + N3
    const Eigen::Matrix<double, 9, 9> &V = svd.matrixV();
    PolyMatrix E{};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            Poly &p = E[r][c];
            p.fill(0.0);
            p[kX] = V(3 * r + c, 5);
            p[kY] = V(3 * r + c, 6);
            p[kZ] = V(3 * r + c, 7);
            p[kOne] = V(3 * r + c, 8);
        }
    }

    PolyMatrix EEt{};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            Poly acc{};
            for (int k = 0; k < 3; ++k)
                acc = add(acc, mul(E[r][k], E[c][k]));
            EEt[r][c] = acc;
        }
    }
    const Poly trace = add(add(EEt[0][0], EEt[1][1]), EEt[2][2]);

    Eigen::Matrix<double, 10, 20> A;
    const Poly det =
        add(sub(mul(E[0][0], sub(mul(E[1][1], E[2][2]), mul(E[1][2], E[2][1]))),
                mul(E[0][1], sub(mul(E[1][0], E[2][2]), mul(E[1][2], E[2][0])))),
            mul(E[0][2], sub(mul(E[1][0], E[2][1]), mul(E[1][1], E[2][0]))));
    for (int j = 0; j < kNumMonomials; ++j)
        A(0, j) = det[j];

    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            Poly acc{};
            for (int k = 0; k < 3; ++k)
                acc = add(acc, mul(EEt[r][k], E[k][c]));
            const Poly row = sub(scale(acc, 2.0), mul(trace, E[r][c]));
            for (int j = 0; j < kNumMonomials; ++j)
                A(1 + 3 * r + c, j) = row[j];
        }
    }

    const Eigen::FullPivLU<Eigen::Matrix<double, 10, 10>> lu(A.leftCols<10>());
    if (lu.rank() < 10)
        return Error(ErrorCode::kDegenerate, "elimination template is singular");
    const Eigen::Matrix<double, 10, 10> G = lu.solve(A.rightCols<10>());

    // Basis b = (x^2, xy, xz, y^2, yz, z^2, x, y, z, 1); rows of M give x * b_k.
    Eigen::Matrix<double, 10, 10> M = Eigen::Matrix<double, 10, 10>::Zero();
    for (int k = 0; k < 6; ++k)
        M.row(k) = -G.row(k);
    M(6, 0) = 1.0;
    M(7, 1) = 1.0;
    M(8, 2) = 1.0;
    M(9, 6) = 1.0;

    const Eigen::EigenSolver<Eigen::Matrix<double, 10, 10>> es(M);
    if (es.info() != Eigen::Success)
        return Error(ErrorCode::kDegenerate, "eigen decomposition failed");

    std::vector<EssentialMatrix> out;
    out.reserve(10);
    for (int i = 0; i < 10; ++i) {
        const std::complex<double> lambda = es.eigenvalues()(i);
        if (std::abs(lambda.imag()) >= 1e-8 * (1.0 + std::abs(lambda.real())))
            continue;
        const auto v = es.eigenvectors().col(i);
        if (std::abs(v(9)) < 1e-14 * v.norm())
            continue;
        const double x = lambda.real();
        const double y = (v(7) / v(9)).real();
        const double z = (v(8) / v(9)).real();

        Eigen::Matrix3d Em;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                Em(r, c) = x * V(3 * r + c, 5) + y * V(3 * r + c, 6) + z * V(3 * r + c, 7) + V(3 * r + c, 8);
        if (!Em.allFinite() || Em.norm() == 0.0)
            continue;
        out.push_back({project_to_essential(Em)});
    }
    return out;
}

} // namespace mdepose
