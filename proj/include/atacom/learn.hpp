#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "atacom/controller.hpp"
#include "atacom/metrics.hpp"

namespace atacom {

namespace detail {

/// splitmix64: decorrelates counter-derived seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + counter * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Linear feature policy with a smooth squash into the policy action box.
struct LinearPolicy {
    Matrix weights;  ///< action_dim x feature_dim
    Vector bias;     ///< action_dim
    Vector alpha_lower;
    Vector alpha_upper;

    static LinearPolicy zeros(int action_dim, int feature_dim) {
        LinearPolicy p;
        p.weights = Matrix::Zero(action_dim, feature_dim);
        p.bias = Vector::Zero(action_dim);
        p.alpha_lower = Vector::Constant(action_dim, -1.0);
        p.alpha_upper = Vector::Constant(action_dim, 1.0);
        return p;
    }

    int action_dim() const { return static_cast<int>(weights.rows()); }
    int feature_dim() const { return static_cast<int>(weights.cols()); }
    int param_count() const { return static_cast<int>(weights.size() + bias.size()); }

    Vector flat_params() const {
        Vector theta(param_count());
        Eigen::Index at = 0;
        for (Eigen::Index r = 0; r < weights.rows(); ++r)
            for (Eigen::Index c = 0; c < weights.cols(); ++c) theta[at++] = weights(r, c);
        theta.tail(bias.size()) = bias;
        return theta;
    }

    void set_flat_params(const Vector& theta) {
        if (theta.size() != param_count())
            throw DimensionError("policy: parameter vector has wrong size");
        Eigen::Index at = 0;
        for (Eigen::Index r = 0; r < weights.rows(); ++r)
            for (Eigen::Index c = 0; c < weights.cols(); ++c) weights(r, c) = theta[at++];
        bias = theta.tail(bias.size());
    }

    /// tanh squash maps the unbounded linear output into the action box.
    Vector act(const Vector& features) const {
        if (features.size() != weights.cols())
            throw DimensionError("policy: feature vector has wrong size");
        Vector raw = weights * features + bias;
        Vector alpha(raw.size());
        for (Eigen::Index i = 0; i < raw.size(); ++i) {
            const double unit = std::tanh(raw[i]);
            alpha[i] = alpha_lower[i] +
                       0.5 * (unit + 1.0) * (alpha_upper[i] - alpha_lower[i]);
        }
        return alpha;
    }
};

/// Plain-text policy file, one matrix row per line.
inline void save_policy(const LinearPolicy& policy, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("policy: cannot write '" + path + "'");
    out << "atacom-policy-1\n";
    out << policy.action_dim() << " " << policy.feature_dim() << "\n";
    out.precision(17);
    for (Eigen::Index r = 0; r < policy.weights.rows(); ++r) {
        for (Eigen::Index c = 0; c < policy.weights.cols(); ++c)
            out << (c ? " " : "") << policy.weights(r, c);
        out << "\n";
    }
    for (Eigen::Index i = 0; i < policy.bias.size(); ++i)
        out << (i ? " " : "") << policy.bias[i];
    out << "\n";
    for (Eigen::Index i = 0; i < policy.alpha_lower.size(); ++i)
        out << (i ? " " : "") << policy.alpha_lower[i];
    out << "\n";
    for (Eigen::Index i = 0; i < policy.alpha_upper.size(); ++i)
        out << (i ? " " : "") << policy.alpha_upper[i];
    out << "\n";
}

inline LinearPolicy load_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("policy: cannot open '" + path + "'");
    std::string tag;
    in >> tag;
    if (tag != "atacom-policy-1")
        throw ConfigError("policy: unknown file tag '" + tag + "'");
    int action_dim = 0, feature_dim = 0;
    in >> action_dim >> feature_dim;
    if (!in || action_dim < 1 || feature_dim < 1)
        throw ConfigError("policy: bad dimensions in '" + path + "'");
    LinearPolicy p = LinearPolicy::zeros(action_dim, feature_dim);
    for (Eigen::Index r = 0; r < p.weights.rows(); ++r)
        for (Eigen::Index c = 0; c < p.weights.cols(); ++c) in >> p.weights(r, c);
    for (Eigen::Index i = 0; i < p.bias.size(); ++i) in >> p.bias[i];
    for (Eigen::Index i = 0; i < p.alpha_lower.size(); ++i) in >> p.alpha_lower[i];
    for (Eigen::Index i = 0; i < p.alpha_upper.size(); ++i) in >> p.alpha_upper[i];
    if (!in) throw ConfigError("policy: truncated file '" + path + "'");
    return p;
}

/// One full episode. `alpha_of` maps the live environment to a policy action;
/// with safety off the policy action is stretched linearly onto the system
/// action box and applied raw.
template <typename Env>
EpisodeMetrics run_episode(Env& env, const AtacomController& ctrl, bool safety_on,
                           const std::function<Vector(const Env&)>& alpha_of,
                           std::uint64_t env_seed, double gamma, double tolerance,
                           int episode_index) {
    env.reset(env_seed);
    const AffineSystem& sys = env.affine_system();
    const int u = sys.action_dim;

    EpisodeMetrics m;
    m.episode = episode_index;
    double discount = 1.0;
    bool first = true;
    double final_goal_distance = 0.0;

    while (!env.done()) {
        Vector alpha = alpha_of(env);
        bool saturated = false;
        StepResult step;
        if (safety_on) {
            auto tr = wrap_env_step(ctrl, env, alpha);
            step = tr.step;
            saturated = tr.diag.saturated;
        } else {
            Vector a(u);
            for (int i = 0; i < u; ++i) {
                const double unit = std::clamp(alpha[i], -1.0, 1.0);
                saturated = saturated || unit != alpha[i];
                a[i] = sys.action_lower[i] +
                       0.5 * (unit + 1.0) * (sys.action_upper[i] - sys.action_lower[i]);
            }
            step = env.step(a);
        }
        const double min_margin = step.info.at("min_margin");

        m.steps += 1;
        m.return_undiscounted += step.reward;
        m.return_discounted += discount * step.reward;
        discount *= gamma;
        m.min_margin = first ? min_margin : std::min(m.min_margin, min_margin);
        first = false;
        if (min_margin < -tolerance) m.margin_violation_steps += 1;
        if (step.info.at("hard_collision") > 0.0) m.hard_collision = true;
        if (saturated) m.saturation_steps += 1;
        final_goal_distance = step.info.at("goal_distance");
    }
    m.final_goal_distance = final_goal_distance;
    m.early_termination = m.steps < env.horizon();
    return m;
}

template <typename Env>
std::function<Vector(const Env&)> policy_action(const LinearPolicy& policy) {
    return [policy](const Env& env) { return policy.act(env.observation()); };
}

/// Uniform random policy over the unit action box; rng owned by the closure.
template <typename Env>
std::function<Vector(const Env&)> random_action(int action_dim, std::uint64_t seed) {
    auto rng = std::make_shared<std::mt19937_64>(seed);
    return [rng, action_dim](const Env&) {
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        Vector alpha(action_dim);
        for (int i = 0; i < action_dim; ++i) alpha[i] = dist(*rng);
        return alpha;
    };
}

template <typename Env>
std::function<Vector(const Env&)> zero_action(int action_dim) {
    return [action_dim](const Env&) { return Vector::Zero(action_dim); };
}

struct EvalResult {
    double mean_discounted_return = 0.0;
    std::vector<EpisodeMetrics> episodes;
    long hard_collisions = 0;
};

/// Mean discounted return of a policy over seeded episodes, with per-episode
/// safety statistics.
template <typename Env>
EvalResult evaluate_policy(const LinearPolicy& policy, Env& env,
                           const AtacomController& ctrl, int episodes,
                           std::uint64_t seed, double gamma, double tolerance) {
    EvalResult result;
    for (int e = 0; e < episodes; ++e) {
        EpisodeMetrics m =
            run_episode<Env>(env, ctrl, true, policy_action<Env>(policy),
                             detail::mix_seed(seed, static_cast<std::uint64_t>(e)), gamma,
                             tolerance, e);
        result.mean_discounted_return += m.return_discounted;
        result.hard_collisions += m.hard_collision ? 1 : 0;
        result.episodes.push_back(m);
    }
    if (episodes > 0) result.mean_discounted_return /= episodes;
    return result;
}

/// Cross-entropy policy search over the flattened linear policy parameters.
struct CemConfig {
    int population = 32;
    double elite_fraction = 0.25;
    int iterations = 50;
    double initial_std = 1.0;
    double std_floor = 0.05;
    int episodes_per_candidate = 2;
    double discount = 0.99;

    void validate() const {
        if (population < 4) throw ConfigError("cem: population must be >= 4");
        if (!(elite_fraction > 0.0 && elite_fraction <= 1.0))
            throw ConfigError("cem: elite_fraction must be in (0, 1]");
        if (iterations < 1) throw ConfigError("cem: iterations must be >= 1");
        if (!(initial_std > 0.0)) throw ConfigError("cem: initial_std must be positive");
        if (std_floor < 0.0) throw ConfigError("cem: std_floor must be non-negative");
        if (episodes_per_candidate < 1)
            throw ConfigError("cem: episodes_per_candidate must be >= 1");
        if (!(discount > 0.0 && discount <= 1.0))
            throw ConfigError("cem: discount must be in (0, 1]");
    }
};

struct TrainResult {
    LinearPolicy best_policy;
    double best_return = -std::numeric_limits<double>::infinity();
    std::vector<TrainLogRow> log;
    long hard_collisions = 0;   ///< across every training rollout
    std::uint64_t episode_seed = 0;  ///< seed of the shared scoring episode set
};

/// Iterated diagonal-Gaussian sampling with elite refit. Parameter draws are
/// seeded by counter from the master seed; every candidate is scored on the
/// same pinned episode set (common random numbers), so the objective is a
/// deterministic function of the parameters and elite selection compares
/// policies, not episode luck.
template <typename Env>
TrainResult cem_train(Env& env, const AtacomController& ctrl, const CemConfig& cfg,
                      std::uint64_t seed, double tolerance = 0.01) {
    cfg.validate();
    LinearPolicy proto = LinearPolicy::zeros(env.action_dim(), env.feature_dim());
    const int dim = proto.param_count();
    Vector mean = Vector::Zero(dim);
    Vector std_dev = Vector::Constant(dim, cfg.initial_std);
    const int n_elite =
        std::max(1, static_cast<int>(std::ceil(cfg.population * cfg.elite_fraction)));

    TrainResult result;
    result.best_policy = proto;
    result.episode_seed = detail::mix_seed(seed, 0xC011EC7ULL);
    std::uint64_t counter = 0;

    for (int iter = 0; iter < cfg.iterations; ++iter) {
        std::vector<Vector> thetas(cfg.population);
        std::vector<double> returns(cfg.population);
        double iter_mean = 0.0;
        for (int cand = 0; cand < cfg.population; ++cand) {
            std::mt19937_64 rng(detail::mix_seed(seed, counter++));
            std::normal_distribution<double> normal(0.0, 1.0);
            Vector theta(dim);
            for (int i = 0; i < dim; ++i) theta[i] = mean[i] + std_dev[i] * normal(rng);
            thetas[cand] = theta;

            LinearPolicy candidate = proto;
            candidate.set_flat_params(theta);
            EvalResult eval = evaluate_policy(candidate, env, ctrl,
                                              cfg.episodes_per_candidate,
                                              result.episode_seed,
                                              cfg.discount, tolerance);
            returns[cand] = eval.mean_discounted_return;
            result.hard_collisions += eval.hard_collisions;
            iter_mean += eval.mean_discounted_return;

            if (eval.mean_discounted_return > result.best_return) {
                result.best_return = eval.mean_discounted_return;
                result.best_policy = candidate;
            }
        }
        iter_mean /= cfg.population;

        std::vector<int> order(cfg.population);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&returns](int a, int b) { return returns[a] > returns[b]; });

        Vector new_mean = Vector::Zero(dim);
        for (int e = 0; e < n_elite; ++e) new_mean += thetas[order[e]];
        new_mean /= n_elite;
        Vector var = Vector::Zero(dim);
        for (int e = 0; e < n_elite; ++e) {
            const Vector d = thetas[order[e]] - new_mean;
            var += d.cwiseProduct(d);
        }
        var /= n_elite;
        mean = new_mean;
        std_dev = var.cwiseSqrt().cwiseMax(cfg.std_floor);

        result.log.push_back(TrainLogRow{iter, result.best_return, iter_mean,
                                         result.hard_collisions});
    }
    return result;
}

}  // namespace atacom
