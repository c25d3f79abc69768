#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "atacom/errors.hpp"
#include "atacom/systems.hpp"

namespace atacom {

namespace detail {

inline constexpr double kGramConditionLimit = 1e12;

/// Condition number of the Gram matrix J J^T (ratio of extreme eigenvalues).
inline double gram_condition(const Matrix& gram) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

inline Eigen::LDLT<Matrix> gram_factor(const Matrix& jac, double damping) {
    const Eigen::Index k = jac.rows();
    Matrix gram = jac * jac.transpose();
    if (damping > 0.0) {
        gram.diagonal().array() += damping;
    } else if (gram_condition(gram) > kGramConditionLimit) {
        throw SingularError("tangent: J J^T condition exceeds 1e12 with zero damping");
    }
    Eigen::LDLT<Matrix> ldlt(gram);
    if (ldlt.info() != Eigen::Success)
        throw SingularError("tangent: J J^T factorization failed (k=" + std::to_string(k) + ")");
    return ldlt;
}

}  // namespace detail

/// Estimate of cond(J J^T), used for controller diagnostics.
inline double jacobian_condition(const Matrix& jac) {
    return detail::gram_condition(jac * jac.transpose());
}

/// Projection of the action bases onto the tangent space of the constraint
/// manifold:
///   N = (I - J^T (J J^T + damping I)^-1 J) Z,   Z = [I_u; 0_{k x u}],
/// for J of shape k x (u + k). The columns are continuous in J (no
/// decomposition sign choices) and intentionally not re-orthonormalized:
/// their shrinking norm near the boundary is what morphs the action space.
inline Matrix projected_null_space(const Matrix& jac, double damping) {
    const Eigen::Index k = jac.rows();
    const Eigen::Index u = jac.cols() - k;
    if (k < 1 || u < 0) throw DimensionError("projected_null_space: need k >= 1, cols >= k");
    if (!jac.allFinite()) throw DomainError("projected_null_space: non-finite Jacobian");

    auto ldlt = detail::gram_factor(jac, damping);
    const Matrix j_action = jac.leftCols(u);  // J Z
    Matrix basis = Matrix::Zero(u + k, u);
    basis.topRows(u).setIdentity();
    basis.noalias() -= jac.transpose() * ldlt.solve(j_action);
    return basis;
}

/// Damped minimum-norm solve: returns J^T (J J^T + damping I)^-1 v.
inline Vector damped_pinv_apply(const Matrix& jac, const Vector& v, double damping) {
    if (v.size() != jac.rows()) throw DimensionError("damped_pinv_apply: bad rhs size");
    if (!jac.allFinite() || !v.allFinite())
        throw DomainError("damped_pinv_apply: non-finite input");
    auto ldlt = detail::gram_factor(jac, damping);
    return jac.transpose() * ldlt.solve(v);
}

/// Orthonormal kernel basis of J via Householder QR of J^T, the
/// decomposition-based baseline. Column signs are canonicalized to
/// first-nonzero-positive; the basis can still jump along smooth paths,
/// which is exactly the defect the projected variant avoids.
inline Matrix qr_null_space(const Matrix& jac) {
    const Eigen::Index k = jac.rows();
    const Eigen::Index n = jac.cols();
    const Eigen::Index u = n - k;
    if (k < 1 || u < 0) throw DimensionError("qr_null_space: need k >= 1, cols >= k");

    Eigen::HouseholderQR<Matrix> qr(jac.transpose());
    const Matrix r_top = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    const double r_max = r_top.diagonal().cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < k; ++i) {
        if (std::abs(r_top(i, i)) <= 1e-12 * std::max(1.0, r_max))
            throw RankError("qr_null_space: rank-deficient Jacobian");
    }

    Matrix q = qr.householderQ();
    Matrix basis = q.rightCols(u);
    for (Eigen::Index col = 0; col < u; ++col) {
        const double scale = basis.col(col).cwiseAbs().maxCoeff();
        for (Eigen::Index row = 0; row < basis.rows(); ++row) {
            if (std::abs(basis(row, col)) > 1e-12 * std::max(1.0, scale)) {
                if (basis(row, col) < 0.0) basis.col(col) *= -1.0;
                break;
            }
        }
    }
    return basis;
}

}  // namespace atacom
