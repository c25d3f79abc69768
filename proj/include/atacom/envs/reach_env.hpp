#pragma once

#include <cmath>
#include <random>
#include <string>

#include "atacom/envs/env_core.hpp"
#include "atacom/kinematics.hpp"
#include "atacom/slack.hpp"

namespace atacom {

/// Planar 3-link reaching among static obstacles. Joint-limit constraints
/// plus one distance constraint per body point of interest; the goal is the
/// only uncontrollable state and it never moves.
struct ReachParams {
    std::vector<double> link_lengths{1.0, 1.0, 1.0};
    double joint_limit = 2.7;        ///< symmetric bound on every joint angle
    double poi_clearance = 0.05;     ///< delta for every point of interest
    double joint_speed = 2.0;        ///< joint velocity bound
    double dt = 1.0 / 30.0;
    int horizon = 500;
    double goal_radius = 0.1;
    double init_clearance = 0.05;
    double min_start_goal_distance = 0.5;
    double goal_obstacle_clearance = 0.15;
    double goal_radius_lo = 0.35;    ///< goal sampling band, fractions of reach
    double goal_radius_hi = 0.9;
    RewardSpec reward;
    SlackModel slack;
    SdfScene scene = default_scene();

    /// Desk scene exercising every shape type, placed around a unit-link arm
    /// based at the origin.
    static SdfScene default_scene() {
        SdfScene scene;
        scene.shapes = {Circle{Vec2(3.6, 0.0), 0.5},
                        Box{Vec2(0.0, 2.2), Vec2(1.2, 0.3), 0.2},
                        Capsule{Vec2(-2.5, -1.5), Vec2(-1.0, -2.5), 0.3},
                        HalfPlane{Vec2(0.0, 1.0), -3.2}};
        return scene;
    }
};

class ReachEnv2D {
  public:
    using State = EnvState;
    using Step = StepResult;

    explicit ReachEnv2D(ReachParams params = {}) : params_(std::move(params)) {
        arm_.link_lengths = params_.link_lengths;
        arm_.pois = default_pois(arm_.num_joints(), params_.poi_clearance);
        arm_.validate();
        ee_poi_ = static_cast<int>(arm_.pois.size()) - 1;  // end of the last link

        const int n = arm_.num_joints();
        system_ = single_integrator(n);
        system_.action_lower = Vector::Constant(n, -params_.joint_speed);
        system_.action_upper = Vector::Constant(n, params_.joint_speed);
        build_constraints();
    }

    const AffineSystem& affine_system() const { return system_; }
    const ConstraintSet& constraint_set() const { return constraints_; }
    const ReachParams& params() const { return params_; }
    const PlanarArm& arm() const { return arm_; }
    const State& state() const { return state_; }
    bool done() const { return done_; }
    int horizon() const { return params_.horizon; }
    int action_dim() const { return arm_.num_joints(); }
    int feature_dim() const { return arm_.num_joints() + 2; }

    /// x layout: [goal x, goal y]; the goal is static, so x_dot = 0.
    State reset(unsigned long long seed) {
        rng_.seed(seed);
        const int n = arm_.num_joints();
        const double reach = total_reach();
        std::uniform_real_distribution<double> joint(-params_.joint_limit,
                                                     params_.joint_limit);
        std::uniform_real_distribution<double> angle(-M_PI, M_PI);
        std::uniform_real_distribution<double> radius(params_.goal_radius_lo * reach,
                                                      params_.goal_radius_hi * reach);

        for (int attempt = 0; attempt < 1000; ++attempt) {
            Vector q(n);
            for (int i = 0; i < n; ++i) q[i] = joint(rng_);
            const double phi = angle(rng_);
            const double rad = radius(rng_);
            const Vec2 goal = arm_.base_position + rad * Vec2(std::cos(phi), std::sin(phi));

            Vector x(2);
            x << goal.x(), goal.y();
            if (sdf_query(params_.scene, goal).distance < params_.goal_obstacle_clearance)
                continue;
            const Vector c = constraints_.values(q, x);
            if ((-c.maxCoeff()) < params_.init_clearance) continue;
            const Vec2 ee = fk_poi(arm_, q, ee_poi_);
            if ((goal - ee).norm() < params_.min_start_goal_distance) continue;

            state_.q = q;
            state_.x = x;
            state_.x_dot = Vector::Zero(2);
            state_.t = 0;
            done_ = false;
            return state_;
        }
        throw InitFailure("reach reset: no feasible start after 1000 attempts");
    }

    Step step(const Vector& a) {
        if (done_) throw StepAfterDone("reach step: episode already terminated");

        state_.q = step_euler(system_, state_.q, a, params_.dt);
        state_.t += 1;

        const Vector c = constraints_.values(state_.q, state_.x);
        const double min_margin = -c.maxCoeff();
        // body margin: actual point-to-surface distance of the worst PoI
        const int n_limits = 2 * arm_.num_joints();
        double body_margin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < static_cast<int>(arm_.pois.size()); ++i) {
            const double d = arm_.pois[i].clearance - c[n_limits + i];
            body_margin = std::min(body_margin, d);
        }

        const Vec2 ee = fk_poi(arm_, state_.q, ee_poi_);
        const Vec2 goal(state_.x[0], state_.x[1]);
        const double goal_distance = (goal - ee).norm();

        const bool collided = body_margin < 0.0;
        const bool reached = goal_distance < params_.goal_radius;

        Step out;
        out.info["goal_distance_term"] = -params_.reward.rho_d * goal_distance;
        out.info["heading_term"] = 0.0;  // point goal: no heading shaping
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

    /// Policy features: joint angles, then the goal offset from the tip.
    Vector observation() const {
        const Vec2 ee = fk_poi(arm_, state_.q, ee_poi_);
        Vector f(feature_dim());
        f.head(arm_.num_joints()) = state_.q;
        f[arm_.num_joints()] = state_.x[0] - ee.x();
        f[arm_.num_joints() + 1] = state_.x[1] - ee.y();
        return f;
    }

    double total_reach() const {
        double sum = 0.0;
        for (double len : arm_.link_lengths) sum += len;
        return sum;
    }

  private:
    void build_constraints() {
        const int n = arm_.num_joints();
        constraints_.q_dim = n;
        constraints_.x_dim = 2;

        // joint box: q_i <= limit and -q_i <= limit
        for (int i = 0; i < n; ++i) {
            for (double sign : {1.0, -1.0}) {
                Constraint c;
                c.name = std::string(sign > 0 ? "joint_upper_" : "joint_lower_") +
                         std::to_string(i);
                c.slack = params_.slack;
                const double limit = params_.joint_limit;
                c.value = [i, sign, limit](const Vector& q, const Vector&) {
                    return sign * q[i] - limit;
                };
                c.jac_q = [i, sign, n](const Vector&, const Vector&) {
                    Vector row = Vector::Zero(n);
                    row[i] = sign;
                    return row;
                };
                constraints_.items.push_back(c);
            }
        }

        // one distance constraint per PoI against the static scene
        const PlanarArm arm = arm_;
        const SdfScene scene = params_.scene;
        for (int i = 0; i < static_cast<int>(arm_.pois.size()); ++i) {
            constraints_.items.push_back(sdf_point_constraint(
                "poi_" + std::to_string(i), arm_.pois[i].clearance,
                [arm, i](const Vector& q) { return fk_poi(arm, q, i); },
                [arm, i](const Vector& q) { return fk_jacobian(arm, q, i); },
                [scene](const Vector&) { return scene; }, -1, params_.slack));
        }
    }

    ReachParams params_;
    PlanarArm arm_;
    int ee_poi_ = 0;
    AffineSystem system_;
    ConstraintSet constraints_;
    State state_;
    std::mt19937_64 rng_;
    bool done_ = true;
};

}  // namespace atacom
