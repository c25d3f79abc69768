#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "atacom/controller.hpp"
#include "support.hpp"

using atacom::AtacomController;
using atacom::Constraint;
using atacom::ConstraintKind;
using atacom::ConstraintSet;
using atacom::Matrix;
using atacom::SlackKind;
using atacom::SlackModel;
using atacom::Vector;

namespace {

Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

// Single integrator on the line with the half-line constraint q <= 0.
AtacomController line_controller(SlackKind kind, double beta) {
    AtacomController ctrl;
    ctrl.system = atacom::single_integrator(1);
    ctrl.constraints.q_dim = 1;
    ctrl.constraints.x_dim = 0;
    Constraint c;
    c.name = "halfline";
    c.value = [](const Vector& q, const Vector&) { return q[0]; };
    c.jac_q = [](const Vector&, const Vector&) { return vec({1.0}); };
    c.slack = SlackModel(kind, beta);
    ctrl.constraints.items = {c};
    ctrl.correction_gain = 0.0;
    ctrl.damping = 0.0;
    return ctrl;
}

// Planar single integrator constrained to the diagonal q0 = q1.
AtacomController diagonal_controller(double gain) {
    AtacomController ctrl;
    ctrl.system = atacom::single_integrator(2);
    ctrl.constraints.q_dim = 2;
    ctrl.constraints.x_dim = 0;
    Constraint c;
    c.kind = ConstraintKind::Equality;
    c.name = "diagonal";
    c.value = [](const Vector& q, const Vector&) { return q[0] - q[1]; };
    c.jac_q = [](const Vector&, const Vector&) { return vec({1.0, -1.0}); };
    ctrl.constraints.items = {c};
    ctrl.correction_gain = gain;
    ctrl.damping = 0.0;
    return ctrl;
}

const Vector kEmpty = Vector::Zero(0);

}  // namespace

TEST_CASE("no constraints means identity on the policy action", "[controller]") {
    AtacomController ctrl;
    ctrl.system = atacom::single_integrator(2);
    ctrl.constraints.q_dim = 2;
    auto [a, diag] = atacom::compute_safe_action(ctrl, vec({3.0, -1.0}), kEmpty, kEmpty,
                                                 vec({0.4, -0.9}));
    REQUIRE(a[0] == 0.4);
    REQUIRE(a[1] == -0.9);
    REQUIRE_FALSE(diag.saturated);

    // policy actions outside the default unit box are clipped first
    auto [b, diag2] = atacom::compute_safe_action(ctrl, vec({0.0, 0.0}), kEmpty, kEmpty,
                                                  vec({2.0, -0.5}));
    REQUIRE(b[0] == 1.0);
    REQUIRE(b[1] == -0.5);
    (void)diag2;
}

TEST_CASE("half-line probe reproduces the hand-solved action split", "[controller]") {
    AtacomController ctrl = line_controller(SlackKind::Exponential, 1.0);
    auto [a, diag] = atacom::compute_safe_action(ctrl, vec({-0.5}), kEmpty, kEmpty, vec({1.0}));

    // c = -0.5, mu = log 0.5, J = [1, 0.5]: N = [0.2, -0.4]^T
    REQUIRE(a[0] == Catch::Approx(0.2).epsilon(1e-12));
    REQUIRE(diag.mu_dot[0] == Catch::Approx(-0.4).epsilon(1e-12));

    // zero constraint velocity: J_q a + J_mu mu_dot = 0
    const double cdot = 1.0 * a[0] + 0.5 * diag.mu_dot[0];
    REQUIRE(std::abs(cdot) <= 1e-12);
    REQUIRE(diag.residual.cwiseAbs().maxCoeff() <= 1e-12);
    REQUIRE_FALSE(diag.clamped);
}

TEST_CASE("action gain vanishes at the constraint boundary", "[controller]") {
    for (SlackKind kind : {SlackKind::Exponential, SlackKind::SoftCorner}) {
        AtacomController ctrl = line_controller(kind, 1.0);
        auto [a, diag] = atacom::compute_safe_action(ctrl, vec({-1e-6}), kEmpty, kEmpty,
                                                     vec({1.0}));
        REQUIRE(std::abs(a[0]) <= 1e-5);
        (void)diag;
    }
}

TEST_CASE("boundary gain decreases monotonically toward the boundary", "[controller]") {
    for (SlackKind kind : {SlackKind::Exponential, SlackKind::SoftCorner}) {
        AtacomController ctrl = line_controller(kind, 1.0);
        double prev = std::numeric_limits<double>::infinity();
        for (double c : {-2.0, -1.0, -0.5, -0.1, -0.01, -1e-3}) {
            auto [a, diag] = atacom::compute_safe_action(ctrl, vec({c}), kEmpty, kEmpty,
                                                         vec({1.0}));
            REQUIRE(a[0] < prev);
            REQUIRE(a[0] >= 0.0);
            prev = a[0];
            (void)diag;
        }
        REQUIRE(prev <= 0.05);  // gain at c = -1e-3
    }
}

TEST_CASE("constraint velocity is zero for the full solution", "[controller]") {
    // Random two-constraint setup on a 3-state single integrator.
    AtacomController ctrl;
    ctrl.system = atacom::single_integrator(3);
    ctrl.constraints.q_dim = 3;
    ctrl.constraints.x_dim = 2;
    Constraint c1;
    c1.name = "plane";
    c1.value = [](const Vector& q, const Vector& x) {
        return q[0] + 2.0 * q[1] - 0.5 * q[2] + 0.3 * x[0] - 4.0;
    };
    c1.jac_q = [](const Vector&, const Vector&) { return vec({1.0, 2.0, -0.5}); };
    c1.jac_x = [](const Vector&, const Vector&) { return vec({0.3, 0.0}); };
    c1.slack = SlackModel(SlackKind::SoftCorner, 2.0);
    Constraint c2;
    c2.name = "shifted";
    c2.value = [](const Vector& q, const Vector& x) {
        return -q[0] + 0.5 * q[1] + q[2] + x[1] - 5.0;
    };
    c2.jac_q = [](const Vector&, const Vector&) { return vec({-1.0, 0.5, 1.0}); };
    c2.jac_x = [](const Vector&, const Vector&) { return vec({0.0, 1.0}); };
    c2.slack = SlackModel(SlackKind::Exponential, 1.0);
    ctrl.constraints.items = {c1, c2};
    ctrl.correction_gain = 0.0;
    ctrl.damping = 0.0;

    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> qd(-1.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        Vector q = vec({qd(rng), qd(rng), qd(rng)});
        Vector x = vec({qd(rng), qd(rng)});
        Vector x_dot = vec({qd(rng), qd(rng)});
        Vector alpha = vec({qd(rng), qd(rng), qd(rng)});
        auto [a, diag] = atacom::compute_safe_action(ctrl, q, x, x_dot, alpha);
        REQUIRE_FALSE(diag.clamped);

        const Matrix jac_q = ctrl.constraints.jacobian_q(q, x);
        const Matrix jac_x = ctrl.constraints.jacobian_x(q, x);
        Vector cbar_dot = jac_q * a + jac_x * x_dot;
        for (int i = 0; i < 2; ++i)
            cbar_dot[i] +=
                atacom::slack_derivative(ctrl.constraints.items[i].slack, diag.slack[i]) *
                diag.mu_dot[i];
        REQUIRE(cbar_dot.cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("residual feedback contracts an equality violation", "[controller]") {
    AtacomController ctrl = diagonal_controller(10.0);
    const double dt = 1.0 / 30.0;  // K dt = 1/3 < 1
    Vector q = vec({0.2, -0.1});
    double prev = std::abs(q[0] - q[1]);
    for (int step = 0; step < 60; ++step) {
        auto [a, diag] = atacom::compute_safe_action(ctrl, q, kEmpty, kEmpty, vec({0.0, 0.0}));
        q = atacom::step_euler(ctrl.system, q, a, dt);
        const double now = std::abs(q[0] - q[1]);
        REQUIRE(now < prev);
        prev = now;
        (void)diag;
    }
    REQUIRE(prev <= 1e-4);
}

TEST_CASE("continuous-time residual rate matches the feedback gain", "[controller]") {
    AtacomController ctrl = diagonal_controller(10.0);
    Vector q = vec({0.3, 0.1});
    auto [a, diag] = atacom::compute_safe_action(ctrl, q, kEmpty, kEmpty, vec({0.0, 0.0}));
    // d c_bar / dt = J_q a = -K c_bar for an equality with alpha = 0
    const double cbar = q[0] - q[1];
    const double rate = a[0] - a[1];
    REQUIRE(rate == Catch::Approx(-10.0 * cbar).epsilon(1e-9));
    (void)diag;
}

TEST_CASE("violated inequality recovers through the residual", "[controller]") {
    AtacomController ctrl = line_controller(SlackKind::Exponential, 1.0);
    ctrl.correction_gain = 10.0;
    const double dt = 1.0 / 30.0;
    Vector q = vec({0.05});  // already violating q <= 0
    // the residual feedback contracts q toward -margin from above, so the
    // clamp stays active for the whole approach
    for (int step = 0; step < 120 && q[0] > -ctrl.margin; ++step) {
        auto [a, diag] = atacom::compute_safe_action(ctrl, q, kEmpty, kEmpty, vec({0.0}));
        REQUIRE(diag.clamped);
        REQUIRE(diag.residual[0] > 0.0);
        REQUIRE(a[0] < 0.0);  // pushes back toward the feasible side
        q = atacom::step_euler(ctrl.system, q, a, dt);
    }
    REQUIRE(q[0] <= 1e-3);
}

TEST_CASE("saturation clips and flags the system action", "[controller]") {
    AtacomController ctrl = diagonal_controller(10.0);
    ctrl.system.action_lower = vec({-0.01, -0.01});
    ctrl.system.action_upper = vec({0.01, 0.01});
    auto [a, diag] = atacom::compute_safe_action(ctrl, vec({0.5, -0.5}), kEmpty, kEmpty,
                                                 vec({0.0, 0.0}));
    REQUIRE(diag.saturated);
    REQUIRE(a.cwiseAbs().maxCoeff() <= 0.01 + 1e-15);
}

TEST_CASE("identical inputs give bit-identical safe actions", "[controller]") {
    AtacomController ctrl = line_controller(SlackKind::SoftCorner, 1.5);
    auto [a1, d1] = atacom::compute_safe_action(ctrl, vec({-0.7}), kEmpty, kEmpty, vec({0.3}));
    auto [a2, d2] = atacom::compute_safe_action(ctrl, vec({-0.7}), kEmpty, kEmpty, vec({0.3}));
    REQUIRE(a1[0] == a2[0]);
    REQUIRE(d1.mu_dot[0] == d2.mu_dot[0]);
    REQUIRE((d1.tangent_basis - d2.tangent_basis).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("controller rejects mismatched dimensions", "[controller]") {
    AtacomController ctrl = line_controller(SlackKind::Exponential, 1.0);
    REQUIRE_THROWS_AS(
        atacom::compute_safe_action(ctrl, vec({0.0, 0.0}), kEmpty, kEmpty, vec({1.0})),
        atacom::DimensionError);
    REQUIRE_THROWS_AS(
        atacom::compute_safe_action(ctrl, vec({-0.5}), kEmpty, kEmpty, vec({1.0, 2.0})),
        atacom::DimensionError);
    REQUIRE_THROWS_AS(
        atacom::compute_safe_action(ctrl, vec({-0.5}), vec({1.0}), kEmpty, vec({1.0})),
        atacom::DimensionError);
}

TEST_CASE("tangent bases stay consistent along a state path", "[controller]") {
    // Dense sampling along a path toward and away from the boundary: the
    // basis must evolve continuously (no sign jumps), unlike QR kernels.
    for (SlackKind kind : {SlackKind::Exponential, SlackKind::SoftCorner}) {
        AtacomController ctrl = line_controller(kind, 1.0);
        Matrix prev;
        for (double c = -3.0; c <= -1e-3; c += 1e-3) {
            auto [a, diag] = atacom::compute_safe_action(ctrl, vec({c}), kEmpty, kEmpty,
                                                         vec({1.0}));
            if (prev.size() > 0) {
                REQUIRE((diag.tangent_basis - prev).norm() <= 0.05);
                REQUIRE(diag.tangent_basis.col(0).dot(prev.col(0)) > 0.0);
            }
            prev = diag.tangent_basis;
            (void)a;
        }
    }
}
