#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "atacom/constraints.hpp"
#include "atacom/errors.hpp"
#include "atacom/slack.hpp"
#include "atacom/systems.hpp"
#include "atacom/tangent.hpp"

namespace atacom {

enum class BasisMethod { Projected, Qr };

inline BasisMethod basis_method_from_string(const std::string& name) {
    if (name == "projected") return BasisMethod::Projected;
    if (name == "qr") return BasisMethod::Qr;
    throw ConfigError("unknown basis method '" + name + "' (expected projected|qr)");
}

/// Per-step byproducts of the safe-action computation.
struct Diagnostics {
    Vector constraint_values;  ///< c(q, x)
    Vector slack;              ///< mu (0 for equality rows)
    Vector residual;           ///< c_bar = c + s(mu); nonzero when clamped or equality
    Matrix tangent_basis;      ///< N, (u+k) x u
    Vector mu_dot;             ///< slack velocity rows of the solution (discarded as state)
    bool saturated = false;    ///< action hit the system bounds
    bool clamped = false;      ///< some constraint was clamped at the margin
    double condition = 1.0;    ///< cond(J J^T) estimate
};

/// Safe-action transformation for an affine system under a constraint set.
/// Evaluation is a pure function of (q, x, x_dot, alpha); slack variables are
/// recomputed from the measured constraint every call, never integrated, so
/// the augmented state sits exactly on the manifold whenever constraints are
/// satisfied.
struct AtacomController {
    AffineSystem system;
    ConstraintSet constraints;
    double correction_gain = 10.0;  ///< K on the residual feedback term
    double damping = 1e-6;          ///< Tikhonov damping of the Gram matrix
    double margin = 1e-4;           ///< clamp: slack is evaluated at min(c, -margin)
    BasisMethod basis = BasisMethod::Projected;
    Vector alpha_lower;  ///< policy action box; empty means [-1, 1]^u
    Vector alpha_upper;
};

namespace detail {

inline Vector clip(const Vector& v, const Vector& lo, const Vector& hi) {
    return v.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace detail

/// Maps a policy action alpha to a system action that keeps the constraints
/// locally satisfied. Pipeline: evaluate constraints, recompute slack from
/// the (clamped) constraint values, assemble J = [J_q G, J_mu] and the drift
/// term F = J_q f + J_x x_dot, project alpha through the tangent basis, and
/// subtract the pseudoinverse compensation of F plus the residual feedback.
inline std::pair<Vector, Diagnostics> compute_safe_action(const AtacomController& ctrl,
                                                          const Vector& q, const Vector& x,
                                                          const Vector& x_dot,
                                                          const Vector& alpha_in) {
    const int n = ctrl.system.state_dim;
    const int u = ctrl.system.action_dim;
    const int m = ctrl.constraints.x_dim;
    const int k = ctrl.constraints.size();
    if (q.size() != n) throw DimensionError("compute_safe_action: bad q size");
    if (x.size() != m) throw DimensionError("compute_safe_action: bad x size");
    if (x_dot.size() != m) throw DimensionError("compute_safe_action: bad x_dot size");
    if (alpha_in.size() != u) throw DimensionError("compute_safe_action: bad alpha size");
    if (ctrl.constraints.q_dim != n)
        throw DimensionError("compute_safe_action: constraint q_dim != system state_dim");

    const Vector alpha_lo =
        ctrl.alpha_lower.size() == u ? ctrl.alpha_lower : Vector::Constant(u, -1.0);
    const Vector alpha_hi =
        ctrl.alpha_upper.size() == u ? ctrl.alpha_upper : Vector::Constant(u, 1.0);
    const Vector alpha = detail::clip(alpha_in, alpha_lo, alpha_hi);

    Diagnostics diag;
    if (k == 0) {
        // Unconstrained: identity transformation on the (clipped) policy action.
        Vector a = detail::clip(alpha, ctrl.system.action_lower, ctrl.system.action_upper);
        diag.tangent_basis = Matrix::Identity(u, u);
        diag.saturated = (a - alpha).cwiseAbs().maxCoeff() > 0.0;
        return {a, diag};
    }

    const Vector c = ctrl.constraints.values(q, x);
    Vector mu = Vector::Zero(k);
    Vector slack_deriv = Vector::Zero(k);
    Vector residual(k);
    bool clamped = false;
    for (int i = 0; i < k; ++i) {
        const auto& item = ctrl.constraints.items[i];
        if (item.kind == ConstraintKind::Equality) {
            residual[i] = c[i];  // J_mu row stays zero
            continue;
        }
        const double c_eff = std::min(c[i], -ctrl.margin);
        clamped = clamped || (c[i] > -ctrl.margin);
        mu[i] = slack_inverse(item.slack, c_eff);
        slack_deriv[i] = slack_derivative(item.slack, mu[i]);
        residual[i] = c[i] + slack_value(item.slack, mu[i]);
    }

    const Matrix jac_q = ctrl.constraints.jacobian_q(q, x);
    const Vector drift = ctrl.system.drift(q);
    const Matrix input = ctrl.system.input_matrix(q);

    Vector f_term = jac_q * drift;
    if (m > 0) f_term += ctrl.constraints.jacobian_x(q, x) * x_dot;

    Matrix jac(k, u + k);
    jac.leftCols(u).noalias() = jac_q * input;
    jac.rightCols(k) = slack_deriv.asDiagonal();

    const Matrix basis = ctrl.basis == BasisMethod::Projected
                             ? projected_null_space(jac, ctrl.damping)
                             : qr_null_space(jac);
    const Vector compensation =
        damped_pinv_apply(jac, f_term + ctrl.correction_gain * residual, ctrl.damping);
    const Vector w = basis * alpha - compensation;

    Vector a = w.head(u);
    const Vector a_sat = detail::clip(a, ctrl.system.action_lower, ctrl.system.action_upper);

    diag.constraint_values = c;
    diag.slack = mu;
    diag.residual = residual;
    diag.tangent_basis = basis;
    diag.mu_dot = w.tail(k);
    diag.saturated = (a_sat - a).cwiseAbs().maxCoeff() > 0.0;
    diag.clamped = clamped;
    diag.condition = jacobian_condition(jac);
    return {a_sat, diag};
}

/// One controller-wrapped environment transition.
template <typename Env>
struct Transition {
    typename Env::State state_before;
    Vector alpha;
    Vector action;
    Diagnostics diag;
    typename Env::Step step;
};

/// Computes the safe action from the environment's (q, x, x_dot) partition
/// and advances the environment with it. x_dot is the environment's ground
/// truth for the scripted obstacle motion.
template <typename Env>
Transition<Env> wrap_env_step(const AtacomController& ctrl, Env& env, const Vector& alpha) {
    Transition<Env> tr;
    tr.state_before = env.state();
    tr.alpha = alpha;
    auto [action, diag] =
        compute_safe_action(ctrl, tr.state_before.q, tr.state_before.x,
                            tr.state_before.x_dot, alpha);
    tr.action = action;
    tr.diag = std::move(diag);
    tr.step = env.step(action);
    return tr;
}

}  // namespace atacom
