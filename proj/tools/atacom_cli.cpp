#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "atacom/config.hpp"
#include "atacom/learn.hpp"
#include "atacom/metrics.hpp"
#include "atacom/validate.hpp"

namespace {

using namespace atacom;

constexpr const char* kCompareSchema = "atacom-compare-1";

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::string policy_kind = "random";  // zero | random | saved
    std::string policy_file;
    std::string safety = "on";
};

void write_effective_config(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.output_dir);
    std::ofstream out(cfg.output_dir + "/config.json");
    if (!out) throw ConfigError("config: cannot write '" + cfg.output_dir + "/config.json'");
    out << run_config_to_json(cfg).dump(2) << "\n";
}

template <typename Env>
std::function<Vector(const Env&)> make_action_fn(const Env& env, const CommonArgs& args,
                                                 std::uint64_t seed) {
    if (args.policy_kind == "zero") return zero_action<Env>(env.action_dim());
    if (args.policy_kind == "random")
        return random_action<Env>(env.action_dim(), detail::mix_seed(seed, 0xA11CE5ULL));
    if (args.policy_kind == "saved") {
        if (args.policy_file.empty())
            throw ConfigError("cli: --policy saved requires --policy-file");
        LinearPolicy p = load_policy(args.policy_file);
        if (p.action_dim() != env.action_dim() || p.feature_dim() != env.feature_dim())
            throw ConfigError("cli: policy dimensions do not match the environment");
        return policy_action<Env>(p);
    }
    throw ConfigError("cli: unknown policy kind '" + args.policy_kind + "'");
}

struct ModeSummary {
    std::string mode;
    int episodes = 0;
    double mean_return = 0.0;
    double mean_steps = 0.0;
    double mean_final_goal_distance = 0.0;
    double worst_min_margin = 0.0;
    long margin_violation_steps = 0;
    int hard_collision_episodes = 0;
    int success_episodes = 0;
};

ModeSummary summarize(const std::string& mode, const std::vector<EpisodeMetrics>& rows) {
    ModeSummary s;
    s.mode = mode;
    s.episodes = static_cast<int>(rows.size());
    bool first = true;
    for (const auto& m : rows) {
        s.mean_return += m.return_undiscounted;
        s.mean_steps += m.steps;
        s.mean_final_goal_distance += m.final_goal_distance;
        s.worst_min_margin = first ? m.min_margin : std::min(s.worst_min_margin, m.min_margin);
        first = false;
        s.margin_violation_steps += m.margin_violation_steps;
        s.hard_collision_episodes += m.hard_collision ? 1 : 0;
        s.success_episodes += (m.early_termination && !m.hard_collision) ? 1 : 0;
    }
    if (s.episodes > 0) {
        s.mean_return /= s.episodes;
        s.mean_steps /= s.episodes;
        s.mean_final_goal_distance /= s.episodes;
    }
    return s;
}

void print_summary(const ModeSummary& s) {
    std::printf("mode %s: episodes=%d mean_return=%.4f mean_steps=%.1f "
                "final_goal_distance=%.4f worst_margin=%.4f violations=%ld "
                "collisions=%d successes=%d\n",
                s.mode.c_str(), s.episodes, s.mean_return, s.mean_steps,
                s.mean_final_goal_distance, s.worst_min_margin, s.margin_violation_steps,
                s.hard_collision_episodes, s.success_episodes);
}

std::string compare_row(const ModeSummary& s) {
    std::string row = s.mode;
    row += "," + std::to_string(s.episodes);
    row += "," + atacom::detail::fmt(s.mean_return);
    row += "," + atacom::detail::fmt(s.mean_steps);
    row += "," + atacom::detail::fmt(s.mean_final_goal_distance);
    row += "," + atacom::detail::fmt(s.worst_min_margin);
    row += "," + std::to_string(s.margin_violation_steps);
    row += "," + std::to_string(s.hard_collision_episodes);
    row += "," + std::to_string(s.success_episodes);
    return row;
}

template <typename Env>
std::vector<EpisodeMetrics> run_batch(Env& env, const AtacomController& ctrl,
                                      const RunConfig& cfg, const CommonArgs& args,
                                      bool safety_on) {
    auto alpha_of = make_action_fn(env, args, cfg.seed);
    std::vector<EpisodeMetrics> rows;
    rows.reserve(cfg.episodes);
    for (int e = 0; e < cfg.episodes; ++e) {
        rows.push_back(run_episode<Env>(env, ctrl, safety_on, alpha_of,
                                        detail::mix_seed(cfg.seed, static_cast<std::uint64_t>(e)),
                                        cfg.training.discount, cfg.safety_tolerance, e));
    }
    return rows;
}

template <typename Env>
int cmd_rollout(Env& env, const RunConfig& cfg, const CommonArgs& args) {
    const AtacomController ctrl =
        make_controller(cfg, env.affine_system(), env.constraint_set());
    const bool safety_on = args.safety == "on";
    const auto rows = run_batch(env, ctrl, cfg, args, safety_on);
    write_effective_config(cfg);
    const std::string path = cfg.output_dir + "/rollout.csv";
    write_metrics_csv(path, rows);
    print_summary(summarize(safety_on ? "on" : "off", rows));
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

template <typename Env>
int cmd_train(Env& env, const RunConfig& cfg) {
    const AtacomController ctrl =
        make_controller(cfg, env.affine_system(), env.constraint_set());
    TrainResult result =
        cem_train<Env>(env, ctrl, cfg.training, cfg.seed, cfg.safety_tolerance);
    write_effective_config(cfg);
    write_train_csv(cfg.output_dir + "/train.csv", result.log);
    save_policy(result.best_policy, cfg.output_dir + "/policy.txt");

    // replay the trained policy on its scoring episode set
    EvalResult eval = evaluate_policy(result.best_policy, env, ctrl,
                                      cfg.training.episodes_per_candidate,
                                      result.episode_seed,
                                      cfg.training.discount, cfg.safety_tolerance);
    write_metrics_csv(cfg.output_dir + "/rollout.csv", eval.episodes);
    std::printf("train: iterations=%d best_return=%.4f training_collisions=%ld\n",
                cfg.training.iterations, result.best_return, result.hard_collisions);
    print_summary(summarize("eval", eval.episodes));
    std::printf("wrote %s/train.csv %s/policy.txt %s/rollout.csv\n", cfg.output_dir.c_str(),
                cfg.output_dir.c_str(), cfg.output_dir.c_str());
    return 0;
}

template <typename Env>
int cmd_compare(Env& env, const RunConfig& cfg, const CommonArgs& args) {
    const AtacomController ctrl =
        make_controller(cfg, env.affine_system(), env.constraint_set());
    const auto rows_on = run_batch(env, ctrl, cfg, args, true);
    const auto rows_off = run_batch(env, ctrl, cfg, args, false);
    const ModeSummary on = summarize("on", rows_on);
    const ModeSummary off = summarize("off", rows_off);

    write_effective_config(cfg);
    const std::string path = cfg.output_dir + "/compare.csv";
    std::ofstream out(path);
    if (!out) throw ConfigError("cli: cannot write '" + path + "'");
    out << "# schema: " << kCompareSchema << "\n";
    out << "mode,episodes,mean_return,mean_steps,mean_final_goal_distance,"
           "worst_min_margin,margin_violation_steps,hard_collision_episodes,"
           "success_episodes\n";
    out << compare_row(on) << "\n" << compare_row(off) << "\n";

    print_summary(on);
    print_summary(off);
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

template <typename Fn>
int with_env(const RunConfig& cfg, Fn&& fn) {
    if (cfg.env_name == "nav") {
        NavEnv2D env(cfg.nav);
        return fn(env);
    }
    ReachEnv2D env(cfg.reach);
    return fn(env);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Safe-exploration control: constraint-manifold action filtering"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonArgs args;
    int episodes_flag = -1;
    long long seed_flag = -1;
    std::string output_flag;
    app.add_option("--config", args.config_path, "Run config JSON file");
    app.add_option("--set", args.sets, "Override config keys, e.g. env.v_max=3.0");
    app.add_option("--episodes", episodes_flag, "Episode count override");
    app.add_option("--seed", seed_flag, "Master seed override");
    app.add_option("--output", output_flag, "Output directory override");

    CLI::App* validate = app.add_subcommand("validate", "Run internal consistency checks");
    CLI::App* rollout = app.add_subcommand("rollout", "Run seeded episodes and write metrics");
    CLI::App* train = app.add_subcommand("train", "Cross-entropy policy search");
    CLI::App* compare =
        app.add_subcommand("compare", "Same seeds with the safety layer on and off");

    for (CLI::App* sub : {rollout, compare}) {
        sub->add_option("--policy", args.policy_kind, "zero | random | saved")
            ->check(CLI::IsMember({"zero", "random", "saved"}));
        sub->add_option("--policy-file", args.policy_file, "Saved policy path");
        sub->add_option("--safety", args.safety, "on | off")
            ->check(CLI::IsMember({"on", "off"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (validate->parsed()) {
            const auto results = run_validation();
            for (const auto& r : results)
                std::printf("[%s] %-28s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                            r.detail.c_str());
            return all_passed(results) ? 0 : 1;
        }

        std::vector<std::string> sets = args.sets;
        if (episodes_flag >= 0)
            sets.push_back("experiment.episodes=" + std::to_string(episodes_flag));
        if (seed_flag >= 0) sets.push_back("experiment.seed=" + std::to_string(seed_flag));
        if (!output_flag.empty()) sets.push_back("experiment.output_dir=" + output_flag);
        const RunConfig cfg = load_run_config(args.config_path, sets);

        if (rollout->parsed())
            return with_env(cfg, [&](auto& env) { return cmd_rollout(env, cfg, args); });
        if (train->parsed())
            return with_env(cfg, [&](auto& env) { return cmd_train(env, cfg); });
        if (compare->parsed())
            return with_env(cfg, [&](auto& env) { return cmd_compare(env, cfg, args); });
        std::fprintf(stderr, "error: no subcommand\n");
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
