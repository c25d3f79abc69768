#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "atacom/controller.hpp"
#include "atacom/envs/nav_env.hpp"
#include "atacom/envs/reach_env.hpp"
#include "atacom/learn.hpp"
#include "atacom/scene_io.hpp"

namespace atacom {

/// Full run description: which environment, controller gains, training
/// setup, and experiment bookkeeping. Every field has a default; unknown
/// keys are rejected; the effective (fully defaulted) config is echoed into
/// the output directory.
struct RunConfig {
    std::string env_name = "nav";  ///< "nav" | "reach"
    NavParams nav;
    ReachParams reach;

    SlackModel slack{SlackKind::SoftCorner, 1.0};
    double correction_gain = 10.0;
    double damping = 1e-6;
    double margin = 1e-4;
    BasisMethod basis = BasisMethod::Projected;

    CemConfig training;

    int episodes = 100;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    double safety_tolerance = 0.01;
};

namespace detail {

inline void config_require_keys(const nlohmann::json& j,
                                std::initializer_list<const char*> allowed,
                                const char* ctx) {
    if (!j.is_object()) throw ConfigError(std::string("config: ") + ctx + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known)
            throw ConfigError(std::string("config: unknown key '") + it.key() + "' in " + ctx);
    }
}

inline void parse_reward(const nlohmann::json& j, RewardSpec& r) {
    r.rho_d = j.value("rho_d", r.rho_d);
    r.rho_angle = j.value("rho_angle", r.rho_angle);
    r.rho_a = j.value("rho_a", r.rho_a);
    r.goal_bonus = j.value("goal_bonus", r.goal_bonus);
    r.terminal_penalty = j.value("terminal_penalty", r.terminal_penalty);
    if (r.rho_d < 0.0 || r.rho_angle < 0.0 || r.rho_a < 0.0)
        throw ConfigError("config: reward scaling factors must be non-negative");
}

inline void reward_to_json(const RewardSpec& r, nlohmann::json& j) {
    j["rho_d"] = r.rho_d;
    j["rho_angle"] = r.rho_angle;
    j["rho_a"] = r.rho_a;
    j["goal_bonus"] = r.goal_bonus;
    j["terminal_penalty"] = r.terminal_penalty;
}

}  // namespace detail

inline NavParams nav_params_from_json(const nlohmann::json& j) {
    detail::config_require_keys(
        j,
        {"name", "room_half_extent", "agent_radius", "clearance", "obstacle_radius",
         "obstacle_speed", "waypoint_margin", "waypoint_radius", "v_max", "w_max", "dt",
         "horizon", "goal_radius", "init_clearance", "goal_margin",
         "min_start_goal_distance", "min_goal_obstacle_distance",
         "heading_gate_sharpness", "heading_gate_distance", "rho_d", "rho_angle", "rho_a",
         "goal_bonus", "terminal_penalty"},
        "env (nav)");
    NavParams p;
    p.room_half_extent = j.value("room_half_extent", p.room_half_extent);
    p.agent_radius = j.value("agent_radius", p.agent_radius);
    p.clearance = j.value("clearance", p.clearance);
    p.obstacle_radius = j.value("obstacle_radius", p.obstacle_radius);
    p.obstacle_speed = j.value("obstacle_speed", p.obstacle_speed);
    p.waypoint_margin = j.value("waypoint_margin", p.waypoint_margin);
    p.waypoint_radius = j.value("waypoint_radius", p.waypoint_radius);
    p.v_max = j.value("v_max", p.v_max);
    p.w_max = j.value("w_max", p.w_max);
    p.dt = j.value("dt", p.dt);
    p.horizon = j.value("horizon", p.horizon);
    p.goal_radius = j.value("goal_radius", p.goal_radius);
    p.init_clearance = j.value("init_clearance", p.init_clearance);
    p.goal_margin = j.value("goal_margin", p.goal_margin);
    p.min_start_goal_distance = j.value("min_start_goal_distance", p.min_start_goal_distance);
    p.min_goal_obstacle_distance =
        j.value("min_goal_obstacle_distance", p.min_goal_obstacle_distance);
    p.heading_gate_sharpness = j.value("heading_gate_sharpness", p.heading_gate_sharpness);
    p.heading_gate_distance = j.value("heading_gate_distance", p.heading_gate_distance);
    detail::parse_reward(j, p.reward);
    if (!(p.dt > 0.0)) throw ConfigError("config: dt must be positive");
    if (p.horizon < 1) throw ConfigError("config: horizon must be >= 1");
    if (!(p.agent_radius > 0.0) || !(p.obstacle_radius > 0.0))
        throw ConfigError("config: radii must be positive");
    if (!(p.v_max > 0.0) || !(p.w_max > 0.0))
        throw ConfigError("config: action bounds must be positive");
    return p;
}

inline ReachParams reach_params_from_json(const nlohmann::json& j) {
    detail::config_require_keys(
        j,
        {"name", "link_lengths", "joint_limit", "poi_clearance", "joint_speed", "dt",
         "horizon", "goal_radius", "init_clearance", "min_start_goal_distance",
         "goal_obstacle_clearance", "goal_radius_lo", "goal_radius_hi", "scene",
         "scene_file", "rho_d", "rho_angle", "rho_a", "goal_bonus", "terminal_penalty"},
        "env (reach)");
    ReachParams p;
    if (j.contains("link_lengths")) {
        p.link_lengths.clear();
        for (const auto& v : j.at("link_lengths")) p.link_lengths.push_back(v.get<double>());
        if (p.link_lengths.empty())
            throw ConfigError("config: link_lengths must be non-empty");
    }
    p.joint_limit = j.value("joint_limit", p.joint_limit);
    p.poi_clearance = j.value("poi_clearance", p.poi_clearance);
    p.joint_speed = j.value("joint_speed", p.joint_speed);
    p.dt = j.value("dt", p.dt);
    p.horizon = j.value("horizon", p.horizon);
    p.goal_radius = j.value("goal_radius", p.goal_radius);
    p.init_clearance = j.value("init_clearance", p.init_clearance);
    p.min_start_goal_distance = j.value("min_start_goal_distance", p.min_start_goal_distance);
    p.goal_obstacle_clearance = j.value("goal_obstacle_clearance", p.goal_obstacle_clearance);
    p.goal_radius_lo = j.value("goal_radius_lo", p.goal_radius_lo);
    p.goal_radius_hi = j.value("goal_radius_hi", p.goal_radius_hi);
    detail::parse_reward(j, p.reward);
    if (j.contains("scene") && j.contains("scene_file"))
        throw ConfigError("config: give either scene or scene_file, not both");
    if (j.contains("scene")) p.scene = scene_from_json(j.at("scene"));
    if (j.contains("scene_file")) p.scene = load_scene(j.at("scene_file").get<std::string>());
    if (!(p.dt > 0.0)) throw ConfigError("config: dt must be positive");
    if (p.horizon < 1) throw ConfigError("config: horizon must be >= 1");
    if (!(p.joint_limit > 0.0)) throw ConfigError("config: joint_limit must be positive");
    if (!(p.joint_speed > 0.0)) throw ConfigError("config: joint_speed must be positive");
    return p;
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    detail::config_require_keys(j, {"env", "controller", "training", "experiment"}, "config");
    RunConfig cfg;

    if (j.contains("env")) {
        const auto& env = j.at("env");
        cfg.env_name = env.value("name", cfg.env_name);
        if (cfg.env_name == "nav") {
            cfg.nav = nav_params_from_json(env);
        } else if (cfg.env_name == "reach") {
            cfg.reach = reach_params_from_json(env);
        } else {
            throw ConfigError("config: unknown env name '" + cfg.env_name +
                              "' (expected nav|reach)");
        }
    }

    if (j.contains("controller")) {
        const auto& c = j.at("controller");
        detail::config_require_keys(
            c, {"slack", "beta", "correction_gain", "damping", "margin", "basis"},
            "controller");
        const SlackKind kind = slack_kind_from_string(c.value("slack", "softcorner"));
        cfg.slack = SlackModel(kind, c.value("beta", 1.0));
        cfg.correction_gain = c.value("correction_gain", cfg.correction_gain);
        cfg.damping = c.value("damping", cfg.damping);
        cfg.margin = c.value("margin", cfg.margin);
        cfg.basis = basis_method_from_string(c.value("basis", "projected"));
        if (cfg.correction_gain < 0.0)
            throw ConfigError("config: correction_gain must be non-negative");
        if (cfg.damping < 0.0) throw ConfigError("config: damping must be non-negative");
        if (!(cfg.margin > 0.0)) throw ConfigError("config: margin must be positive");
    }

    if (j.contains("training")) {
        const auto& t = j.at("training");
        detail::config_require_keys(t,
                                    {"population", "elite_fraction", "iterations",
                                     "initial_std", "std_floor", "episodes_per_candidate",
                                     "discount"},
                                    "training");
        cfg.training.population = t.value("population", cfg.training.population);
        cfg.training.elite_fraction = t.value("elite_fraction", cfg.training.elite_fraction);
        cfg.training.iterations = t.value("iterations", cfg.training.iterations);
        cfg.training.initial_std = t.value("initial_std", cfg.training.initial_std);
        cfg.training.std_floor = t.value("std_floor", cfg.training.std_floor);
        cfg.training.episodes_per_candidate =
            t.value("episodes_per_candidate", cfg.training.episodes_per_candidate);
        cfg.training.discount = t.value("discount", cfg.training.discount);
        cfg.training.validate();
    }

    if (j.contains("experiment")) {
        const auto& e = j.at("experiment");
        detail::config_require_keys(
            e, {"episodes", "seed", "output_dir", "safety_tolerance"}, "experiment");
        cfg.episodes = e.value("episodes", cfg.episodes);
        cfg.seed = e.value("seed", cfg.seed);
        cfg.output_dir = e.value("output_dir", cfg.output_dir);
        cfg.safety_tolerance = e.value("safety_tolerance", cfg.safety_tolerance);
        if (cfg.episodes < 1) throw ConfigError("config: episodes must be >= 1");
        if (cfg.safety_tolerance < 0.0)
            throw ConfigError("config: safety_tolerance must be non-negative");
    }

    // the slack model configured on the controller is baked into the
    // environments' constraint sets
    cfg.nav.slack = cfg.slack;
    cfg.reach.slack = cfg.slack;
    return cfg;
}

/// Fully defaulted effective config, suitable for echoing next to results.
inline nlohmann::json run_config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    nlohmann::json env;
    env["name"] = cfg.env_name;
    if (cfg.env_name == "nav") {
        const NavParams& p = cfg.nav;
        env["room_half_extent"] = p.room_half_extent;
        env["agent_radius"] = p.agent_radius;
        env["clearance"] = p.clearance;
        env["obstacle_radius"] = p.obstacle_radius;
        env["obstacle_speed"] = p.obstacle_speed;
        env["waypoint_margin"] = p.waypoint_margin;
        env["waypoint_radius"] = p.waypoint_radius;
        env["v_max"] = p.v_max;
        env["w_max"] = p.w_max;
        env["dt"] = p.dt;
        env["horizon"] = p.horizon;
        env["goal_radius"] = p.goal_radius;
        env["init_clearance"] = p.init_clearance;
        env["goal_margin"] = p.goal_margin;
        env["min_start_goal_distance"] = p.min_start_goal_distance;
        env["min_goal_obstacle_distance"] = p.min_goal_obstacle_distance;
        env["heading_gate_sharpness"] = p.heading_gate_sharpness;
        env["heading_gate_distance"] = p.heading_gate_distance;
        detail::reward_to_json(p.reward, env);
    } else {
        const ReachParams& p = cfg.reach;
        env["link_lengths"] = p.link_lengths;
        env["joint_limit"] = p.joint_limit;
        env["poi_clearance"] = p.poi_clearance;
        env["joint_speed"] = p.joint_speed;
        env["dt"] = p.dt;
        env["horizon"] = p.horizon;
        env["goal_radius"] = p.goal_radius;
        env["init_clearance"] = p.init_clearance;
        env["min_start_goal_distance"] = p.min_start_goal_distance;
        env["goal_obstacle_clearance"] = p.goal_obstacle_clearance;
        env["goal_radius_lo"] = p.goal_radius_lo;
        env["goal_radius_hi"] = p.goal_radius_hi;
        env["scene"] = scene_to_json(p.scene);
        detail::reward_to_json(p.reward, env);
    }
    j["env"] = env;

    j["controller"] = {{"slack", to_string(cfg.slack.kind)},
                       {"beta", cfg.slack.beta},
                       {"correction_gain", cfg.correction_gain},
                       {"damping", cfg.damping},
                       {"margin", cfg.margin},
                       {"basis", cfg.basis == BasisMethod::Projected ? "projected" : "qr"}};
    j["training"] = {{"population", cfg.training.population},
                     {"elite_fraction", cfg.training.elite_fraction},
                     {"iterations", cfg.training.iterations},
                     {"initial_std", cfg.training.initial_std},
                     {"std_floor", cfg.training.std_floor},
                     {"episodes_per_candidate", cfg.training.episodes_per_candidate},
                     {"discount", cfg.training.discount}};
    j["experiment"] = {{"episodes", cfg.episodes},
                       {"seed", cfg.seed},
                       {"output_dir", cfg.output_dir},
                       {"safety_tolerance", cfg.safety_tolerance}};
    return j;
}

/// Applies one `--set section.key=value` override onto the raw JSON tree.
/// The value text is parsed as JSON when possible, else taken as a string.
inline void apply_config_override(nlohmann::json& j, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("config: override must look like section.key=value, got '" +
                          spec + "'");
    const std::string path = spec.substr(0, eq);
    const std::string text = spec.substr(eq + 1);

    nlohmann::json value;
    try {
        value = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
        value = text;  // bare words become strings
    }

    nlohmann::json* node = &j;
    size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) throw ConfigError("config: empty key in override '" + spec + "'");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

/// Loads, overrides, and validates a run config. An empty path means
/// all-defaults.
inline RunConfig load_run_config(const std::string& path,
                                 const std::vector<std::string>& overrides) {
    nlohmann::json j = nlohmann::json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("config: cannot open '" + path + "'");
        try {
            in >> j;
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("config: parse failure in '" + path + "': " + e.what());
        }
    }
    for (const auto& spec : overrides) apply_config_override(j, spec);
    return run_config_from_json(j);
}

inline AtacomController make_controller(const RunConfig& cfg, const AffineSystem& system,
                                        const ConstraintSet& constraints) {
    AtacomController ctrl;
    ctrl.system = system;
    ctrl.constraints = constraints;
    ctrl.correction_gain = cfg.correction_gain;
    ctrl.damping = cfg.damping;
    ctrl.margin = cfg.margin;
    ctrl.basis = cfg.basis;
    return ctrl;
}

}  // namespace atacom
