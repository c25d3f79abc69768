#pragma once

#include <cmath>
#include <random>
#include <string>

#include "atacom/envs/env_core.hpp"
#include "atacom/slack.hpp"

namespace atacom {

/// Differential-drive navigation in a walled room with one scripted obstacle
/// robot. The obstacle runs constant-speed pure pursuit toward its own random
/// waypoints and ignores the agent; its velocity is known exactly.
struct NavParams {
    double room_half_extent = 5.0;
    double agent_radius = 0.3;
    double clearance = 0.1;          ///< extra margin on top of the body radius
    double obstacle_radius = 0.5;
    double obstacle_speed = 0.8;
    double waypoint_margin = 1.0;    ///< waypoint box inset from the walls
    double waypoint_radius = 0.2;    ///< switch distance for waypoint resampling
    double v_max = 4.0;              ///< forward speed bound
    double w_max = 1.5;              ///< yaw rate bound
    double dt = 1.0 / 30.0;
    int horizon = 500;
    double goal_radius = 0.1;
    double init_clearance = 0.05;    ///< min constraint margin at reset
    double goal_margin = 0.5;        ///< goal box inset from the walls
    double min_start_goal_distance = 1.0;
    double min_goal_obstacle_distance = 1.0;
    double heading_gate_sharpness = 30.0;
    double heading_gate_distance = 0.2;
    RewardSpec reward;
    SlackModel slack;
};

class NavEnv2D {
  public:
    using State = EnvState;
    using Step = StepResult;

    explicit NavEnv2D(NavParams params = {}) : params_(params) {
        system_ = differential_drive();
        system_.action_lower = Vector(2);
        system_.action_lower << -params_.v_max, -params_.w_max;
        system_.action_upper = Vector(2);
        system_.action_upper << params_.v_max, params_.w_max;
        build_constraints();
    }

    const AffineSystem& affine_system() const { return system_; }
    const ConstraintSet& constraint_set() const { return constraints_; }
    const NavParams& params() const { return params_; }
    const State& state() const { return state_; }
    bool done() const { return done_; }
    int horizon() const { return params_.horizon; }
    int action_dim() const { return 2; }
    int feature_dim() const { return 6; }

    /// x layout: [obstacle x, obstacle y, obstacle yaw (fixed 0), goal x, goal y].
    State reset(unsigned long long seed) {
        rng_.seed(seed);
        const double h = params_.room_half_extent;
        std::uniform_real_distribution<double> box_w(-h + params_.waypoint_margin,
                                                     h - params_.waypoint_margin);
        std::uniform_real_distribution<double> box_g(-h + params_.goal_margin,
                                                     h - params_.goal_margin);
        std::uniform_real_distribution<double> box_a(-h + params_.agent_radius,
                                                     h - params_.agent_radius);
        std::uniform_real_distribution<double> angle(-M_PI, M_PI);

        for (int attempt = 0; attempt < 1000; ++attempt) {
            const Vec2 obs(box_w(rng_), box_w(rng_));
            const Vec2 waypoint(box_w(rng_), box_w(rng_));
            const Vec2 goal(box_g(rng_), box_g(rng_));
            Vector q(3);
            q << box_a(rng_), box_a(rng_), angle(rng_);

            Vector x(5);
            x << obs.x(), obs.y(), 0.0, goal.x(), goal.y();
            if ((goal - Vec2(q[0], q[1])).norm() < params_.min_start_goal_distance) continue;
            if ((goal - obs).norm() < params_.min_goal_obstacle_distance) continue;
            const Vector c = constraints_.values(q, x);
            if ((-c.maxCoeff()) < params_.init_clearance) continue;

            state_.q = q;
            state_.x = x;
            state_.t = 0;
            waypoint_ = waypoint;
            refresh_obstacle_velocity();
            done_ = false;
            return state_;
        }
        throw InitFailure("nav reset: no feasible start after 1000 attempts");
    }

    Step step(const Vector& a) {
        if (done_) throw StepAfterDone("nav step: episode already terminated");

        state_.q = step_euler(system_, state_.q, a, params_.dt);
        // advance the obstacle with exactly the velocity that was reported
        state_.x.segment(0, 3) += params_.dt * state_.x_dot.segment(0, 3);
        state_.t += 1;
        refresh_obstacle_velocity();

        const Vector c = constraints_.values(state_.q, state_.x);
        const double min_margin = -c.maxCoeff();
        const double body_margin = params_.clearance + min_margin;

        const Vec2 pos(state_.q[0], state_.q[1]);
        const Vec2 goal(state_.x[3], state_.x[4]);
        const double goal_distance = (goal - pos).norm();
        const double heading_error =
            wrap_angle(std::atan2(goal.y() - pos.y(), goal.x() - pos.x()) - state_.q[2]);
        const double gate =
            1.0 / (1.0 + std::exp(-params_.heading_gate_sharpness *
                                  (goal_distance - params_.heading_gate_distance)));

        const bool collided = body_margin < 0.0;
        const bool reached = goal_distance < params_.goal_radius;

        Step out;
        out.info["goal_distance_term"] = -params_.reward.rho_d * goal_distance;
        out.info["heading_term"] =
            -params_.reward.rho_angle * gate * std::abs(heading_error) / M_PI;
        out.info["action_term"] = -params_.reward.rho_a * a.norm();
        out.info["goal_bonus"] =
            detail::goal_indicator(goal_distance, params_.goal_radius,
                                   params_.reward.goal_bonus);
        out.info["terminal_penalty"] = collided ? params_.reward.terminal_penalty : 0.0;
        out.reward = out.info["goal_distance_term"] + out.info["heading_term"] +
                     out.info["action_term"] + out.info["goal_bonus"] +
                     out.info["terminal_penalty"];

        done_ = collided || reached || state_.t >= params_.horizon;
        out.done = done_;
        out.state = state_;
        out.info["goal_distance"] = goal_distance;
        out.info["min_margin"] = min_margin;
        out.info["body_margin"] = body_margin;
        out.info["hard_collision"] = collided ? 1.0 : 0.0;
        out.info["success"] = reached ? 1.0 : 0.0;
        return out;
    }

    /// Policy features, all in the agent frame: goal offset, obstacle offset,
    /// obstacle velocity.
    Vector observation() const {
        const double th = state_.q[2];
        Eigen::Matrix2d r;
        r << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);  // R(-theta)
        const Vec2 pos(state_.q[0], state_.q[1]);
        const Vec2 obs(state_.x[0], state_.x[1]);
        const Vec2 goal(state_.x[3], state_.x[4]);
        const Vec2 vel(state_.x_dot[0], state_.x_dot[1]);
        Vector f(6);
        f.segment(0, 2) = r * (goal - pos);
        f.segment(2, 2) = r * (obs - pos);
        f.segment(4, 2) = r * vel;
        return f;
    }

  private:
    void build_constraints() {
        constraints_.q_dim = 3;
        constraints_.x_dim = 5;
        const double delta = params_.agent_radius + params_.clearance;
        const double h = params_.room_half_extent;

        auto agent_point = [](const Vector& q) { return Vec2(q[0], q[1]); };
        auto agent_jac = [](const Vector&) {
            Eigen::Matrix2Xd jac = Eigen::Matrix2Xd::Zero(2, 3);
            jac(0, 0) = 1.0;
            jac(1, 1) = 1.0;
            return jac;
        };

        // walls: solid half-planes outside each room face
        const struct {
            const char* name;
            Vec2 normal;
        } walls[4] = {{"wall_pos_x", Vec2(-1.0, 0.0)},
                      {"wall_neg_x", Vec2(1.0, 0.0)},
                      {"wall_pos_y", Vec2(0.0, -1.0)},
                      {"wall_neg_y", Vec2(0.0, 1.0)}};
        for (const auto& wall : walls) {
            SdfScene scene;
            scene.shapes = {HalfPlane{wall.normal, -h}};
            constraints_.items.push_back(sdf_point_constraint(
                wall.name, delta, agent_point, agent_jac,
                [scene](const Vector&) { return scene; }, -1, params_.slack));
        }

        // moving obstacle disc, posed from x
        const double obstacle_radius = params_.obstacle_radius;
        auto obstacle_scene = [obstacle_radius](const Vector& x) {
            SdfScene scene;
            scene.shapes = {Circle{Vec2(0.0, 0.0), obstacle_radius}};
            scene.pose = {x[0], x[1], x[2]};
            return scene;
        };
        constraints_.items.push_back(sdf_point_constraint(
            "obstacle", delta, agent_point, agent_jac, obstacle_scene, 0, params_.slack));
    }

    /// Pure pursuit toward the current waypoint; resamples the waypoint once
    /// it is reached, then reports the exact velocity of the upcoming step.
    void refresh_obstacle_velocity() {
        const double h = params_.room_half_extent;
        std::uniform_real_distribution<double> box_w(-h + params_.waypoint_margin,
                                                     h - params_.waypoint_margin);
        Vec2 obs(state_.x[0], state_.x[1]);
        while ((waypoint_ - obs).norm() < params_.waypoint_radius) {
            waypoint_ = Vec2(box_w(rng_), box_w(rng_));
        }
        const Vec2 dir = (waypoint_ - obs).normalized();
        state_.x_dot = Vector::Zero(5);
        state_.x_dot[0] = params_.obstacle_speed * dir.x();
        state_.x_dot[1] = params_.obstacle_speed * dir.y();
    }

    NavParams params_;
    AffineSystem system_;
    ConstraintSet constraints_;
    State state_;
    Vec2 waypoint_{0.0, 0.0};
    std::mt19937_64 rng_;
    bool done_ = true;
};

}  // namespace atacom
