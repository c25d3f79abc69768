// Shared test helpers: finite-difference oracles and the basis-flip probe path.
#pragma once

#include <Eigen/Dense>
#include <functional>

namespace test_support {

// Central-difference gradient of a scalar field.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-5) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd hi = x, lo = x;
        hi[i] += h;
        lo[i] -= h;
        g[i] = (f(hi) - f(lo)) / (2.0 * h);
    }
    return g;
}

// Central-difference Jacobian of a vector field.
inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6) {
    Eigen::VectorXd f0 = f(x);
    Eigen::MatrixXd jac(f0.size(), x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd hi = x, lo = x;
        hi[i] += h;
        lo[i] -= h;
        jac.col(i) = (f(hi) - f(lo)) / (2.0 * h);
    }
    return jac;
}

// Central difference of a scalar function of one real.
inline double fd_derivative(const std::function<double(double)>& f, double x, double h = 1e-6) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// One-constraint, two-action Jacobian path crossing a sign change in its
// leading entry. QR-based kernels reorder/flip across the crossing even under
// a fixed column-sign convention; the projected bases vary smoothly.
inline Eigen::MatrixXd flip_probe_jacobian(double t) {
    Eigen::MatrixXd jac(1, 3);
    jac << t, 1.0, 0.5;
    return jac;
}

}  // namespace test_support
