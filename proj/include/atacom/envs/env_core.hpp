#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "atacom/constraints.hpp"
#include "atacom/errors.hpp"
#include "atacom/geometry.hpp"
#include "atacom/systems.hpp"

namespace atacom {

/// Environment state split into the controllable part q (agent commanded),
/// the uncontrollable part x (obstacle pose, goal), and the ground-truth
/// velocity of x used by the controller's drift compensation.
struct EnvState {
    Vector q;
    Vector x;
    Vector x_dot;
    int t = 0;
};

/// Reward shaping weights shared by both tasks. The reported reward always
/// equals the exact sum of the logged per-term components.
struct RewardSpec {
    double rho_d = 1.0;               ///< goal distance weight
    double rho_angle = 1.0;           ///< heading weight (navigation only)
    double rho_a = 0.01;              ///< action magnitude weight
    double goal_bonus = 1.0;          ///< indicator bonus inside the goal region
    double terminal_penalty = -1000.0;  ///< added on a collision step
};

/// One environment transition with its reward decomposition in `info`.
struct StepResult {
    EnvState state;
    double reward = 0.0;
    bool done = false;
    std::map<std::string, double> info;
};

/// Distance constraint of one body point against an SDF scene:
///   c = delta - d(p(q), scene)  <= 0,
/// with gradients chained through the point kinematics p(q) and, when the
/// scene pose follows components of x, through the scene pose.
///
/// point:        p(q), the body point in the workspace
/// point_jac:    2 x n Jacobian of p(q)
/// scene_of_x:   scene posed from the current x (captures moving obstacles)
/// pose_index:   offset of (pose x, pose y, yaw) inside x, or -1 when static
inline Constraint sdf_point_constraint(
    std::string name, double delta,
    std::function<Vec2(const Vector& q)> point,
    std::function<Eigen::Matrix2Xd(const Vector& q)> point_jac,
    std::function<SdfScene(const Vector& x)> scene_of_x, int pose_index,
    SlackModel slack) {
    Constraint c;
    c.kind = ConstraintKind::Inequality;
    c.name = std::move(name);
    c.slack = slack;
    c.value = [delta, point, scene_of_x](const Vector& q, const Vector& x) {
        return delta - sdf_query(scene_of_x(x), point(q)).distance;
    };
    c.jac_q = [point, point_jac, scene_of_x](const Vector& q, const Vector& x) {
        const SdfResult res = sdf_query(scene_of_x(x), point(q));
        return Vector(-(res.gradient.transpose() * point_jac(q)).transpose());
    };
    if (pose_index >= 0) {
        c.jac_x = [point, scene_of_x, pose_index](const Vector& q, const Vector& x) {
            const Eigen::RowVector3d pose_jac =
                sdf_scene_jacobian_pose(scene_of_x(x), point(q));
            Vector row = Vector::Zero(x.size());
            row.segment(pose_index, 3) = -pose_jac.transpose();
            return row;
        };
    }
    return c;
}

namespace detail {

inline double goal_indicator(double distance, double radius, double bonus) {
    return distance < radius ? bonus : 0.0;
}

}  // namespace detail

}  // namespace atacom
