#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "atacom/errors.hpp"

namespace atacom {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
    double w = std::remainder(a, 2.0 * M_PI);
    if (w <= -M_PI) w += 2.0 * M_PI;
    return w;
}

/// Nonlinear affine control system  q_dot = f(q) + G(q) a.
struct AffineSystem {
    int state_dim = 0;
    int action_dim = 0;
    std::function<Vector(const Vector&)> drift;         ///< f(q), size state_dim
    std::function<Matrix(const Vector&)> input_matrix;  ///< G(q), state_dim x action_dim
    Vector action_lower;  ///< per-component action bounds
    Vector action_upper;
    std::vector<int> angle_indices;  ///< state components wrapped after integration
};

/// Holonomic velocity control: f = 0, G = I_n.
inline AffineSystem single_integrator(int n) {
    if (n < 1) throw DimensionError("single_integrator: n must be >= 1");
    AffineSystem sys;
    sys.state_dim = n;
    sys.action_dim = n;
    sys.drift = [n](const Vector&) { return Vector::Zero(n); };
    sys.input_matrix = [n](const Vector&) { return Matrix::Identity(n, n); };
    sys.action_lower = Vector::Constant(n, -1e9);
    sys.action_upper = Vector::Constant(n, 1e9);
    return sys;
}

/// Acceleration control with velocity carried as extra state:
/// q = [position; velocity], f = [velocity; 0], G = [0; I].
inline AffineSystem double_integrator(int n_pos) {
    if (n_pos < 1) throw DimensionError("double_integrator: n_pos must be >= 1");
    AffineSystem sys;
    sys.state_dim = 2 * n_pos;
    sys.action_dim = n_pos;
    sys.drift = [n_pos](const Vector& q) {
        Vector f = Vector::Zero(2 * n_pos);
        f.head(n_pos) = q.tail(n_pos);
        return f;
    };
    sys.input_matrix = [n_pos](const Vector&) {
        Matrix g = Matrix::Zero(2 * n_pos, n_pos);
        g.bottomRows(n_pos).setIdentity();
        return g;
    };
    sys.action_lower = Vector::Constant(n_pos, -1e9);
    sys.action_upper = Vector::Constant(n_pos, 1e9);
    return sys;
}

/// Unicycle kinematics: q = (x, y, theta), a = (forward speed, yaw rate).
/// The input columns forbid lateral slip by construction.
inline AffineSystem differential_drive() {
    AffineSystem sys;
    sys.state_dim = 3;
    sys.action_dim = 2;
    sys.drift = [](const Vector&) { return Vector::Zero(3); };
    sys.input_matrix = [](const Vector& q) {
        const double th = q[2];
        Matrix g(3, 2);
        g << std::cos(th), 0.0,
             std::sin(th), 0.0,
             0.0,          1.0;
        return g;
    };
    sys.action_lower = Vector::Constant(2, -1e9);
    sys.action_upper = Vector::Constant(2, 1e9);
    sys.angle_indices = {2};
    return sys;
}

/// Kinematic bicycle in curvature-velocity form. The textbook action set
/// (v, steering angle) is not affine in the action, so the action here is
/// a = (v, L * theta_dot): G = [[cos th, 0], [sin th, 0], [0, 1/L]].
/// With L = 1 this reduces to differential_drive.
inline AffineSystem bicycle(double wheelbase) {
    if (!(wheelbase > 0.0)) throw DomainError("bicycle: wheelbase must be positive");
    AffineSystem sys;
    sys.state_dim = 3;
    sys.action_dim = 2;
    sys.drift = [](const Vector&) { return Vector::Zero(3); };
    sys.input_matrix = [wheelbase](const Vector& q) {
        const double th = q[2];
        Matrix g(3, 2);
        g << std::cos(th), 0.0,
             std::sin(th), 0.0,
             0.0,          1.0 / wheelbase;
        return g;
    };
    sys.action_lower = Vector::Constant(2, -1e9);
    sys.action_upper = Vector::Constant(2, 1e9);
    sys.angle_indices = {2};
    return sys;
}

/// One explicit Euler step q' = q + dt (f(q) + G(q) a), angles wrapped.
/// Throws BoundsError if a leaves the declared action box.
inline Vector step_euler(const AffineSystem& sys, const Vector& q, const Vector& a, double dt) {
    if (!(dt > 0.0)) throw DomainError("step_euler: dt must be positive");
    if (q.size() != sys.state_dim) throw DimensionError("step_euler: bad state size");
    if (a.size() != sys.action_dim) throw DimensionError("step_euler: bad action size");
    constexpr double kTol = 1e-12;
    for (int i = 0; i < sys.action_dim; ++i) {
        if (a[i] < sys.action_lower[i] - kTol || a[i] > sys.action_upper[i] + kTol) {
            throw BoundsError("step_euler: action component " + std::to_string(i) +
                              " outside bounds");
        }
    }
    Vector next = q + dt * (sys.drift(q) + sys.input_matrix(q) * a);
    for (int idx : sys.angle_indices) next[idx] = wrap_angle(next[idx]);
    return next;
}

}  // namespace atacom
