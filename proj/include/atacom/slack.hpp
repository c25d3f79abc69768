#pragma once

#include <cmath>
#include <string>

#include "atacom/errors.hpp"

namespace atacom {

/// Slack parametrizations turning an inequality constraint c <= 0 into the
/// equality manifold c + s(mu) = 0.
///
/// Quadratic   s(mu) = mu^2 / 2          (even in mu; branch-ambiguous)
/// Exponential s(mu) = exp(beta mu)      (bijective onto (0, inf))
/// SoftCorner  s(mu) = softplus(beta mu) / beta = log(1 + exp(beta mu)) / beta
///
/// SoftCorner is bijective like Exponential but its derivative saturates at 1,
/// so far from the boundary it leaves the action space untouched.
enum class SlackKind { Quadratic, Exponential, SoftCorner };

struct SlackModel {
    SlackKind kind = SlackKind::SoftCorner;
    double beta = 1.0;  ///< sharpness; unused by Quadratic

    SlackModel() = default;
    explicit SlackModel(SlackKind k, double b = 1.0) : kind(k), beta(b) {
        if (kind != SlackKind::Quadratic && !(beta > 0.0)) {
            throw DomainError("slack: beta must be positive, got " + std::to_string(b));
        }
    }
};

namespace detail {

// Naive exp/log formulas are exact to double precision below this |beta*mu|.
inline constexpr double kSlackSwitch = 30.0;

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace detail

/// s(mu). Strictly positive for Exponential/SoftCorner, >= 0 for Quadratic.
inline double slack_value(const SlackModel& model, double mu) {
    switch (model.kind) {
        case SlackKind::Quadratic:
            return 0.5 * mu * mu;
        case SlackKind::Exponential:
            return std::exp(model.beta * mu);
        case SlackKind::SoftCorner: {
            const double z = model.beta * mu;
            if (z > detail::kSlackSwitch) {
                // softplus(z) = z + log1p(exp(-z)); exp(-z) below double eps of z
                return mu + std::exp(-z) / model.beta;
            }
            return std::log1p(std::exp(z)) / model.beta;
        }
    }
    return 0.0;  // unreachable
}

/// ds/dmu. SoftCorner derivative is sigmoid(beta mu), in (0, 1).
inline double slack_derivative(const SlackModel& model, double mu) {
    switch (model.kind) {
        case SlackKind::Quadratic:
            return mu;
        case SlackKind::Exponential:
            return model.beta * std::exp(model.beta * mu);
        case SlackKind::SoftCorner:
            return detail::sigmoid(model.beta * mu);
    }
    return 0.0;  // unreachable
}

/// mu with s(mu) = -c, defined for c < 0 strictly inside the feasible region.
/// Quadratic takes the non-negative branch. Throws DomainError for c >= 0.
inline double slack_inverse(const SlackModel& model, double c) {
    if (!(c < 0.0)) {
        throw DomainError("slack_inverse: requires c < 0, got " + std::to_string(c));
    }
    switch (model.kind) {
        case SlackKind::Quadratic:
            return std::sqrt(-2.0 * c);
        case SlackKind::Exponential:
            return std::log(-c) / model.beta;
        case SlackKind::SoftCorner: {
            // Invert softplus: mu = log(exp(-beta c) - 1) / beta.
            const double w = -model.beta * c;  // > 0
            if (w > detail::kSlackSwitch) {
                // exp(w) - 1 = exp(w) (1 - exp(-w)); keeps large w finite
                return -c + std::log1p(-std::exp(-w)) / model.beta;
            }
            // expm1 keeps precision as c -> 0-
            return std::log(std::expm1(w)) / model.beta;
        }
    }
    return 0.0;  // unreachable
}

inline const char* to_string(SlackKind kind) {
    switch (kind) {
        case SlackKind::Quadratic: return "quadratic";
        case SlackKind::Exponential: return "exponential";
        case SlackKind::SoftCorner: return "softcorner";
    }
    return "?";
}

/// Parses the config spelling of a slack kind.
inline SlackKind slack_kind_from_string(const std::string& name) {
    if (name == "quadratic") return SlackKind::Quadratic;
    if (name == "exponential") return SlackKind::Exponential;
    if (name == "softcorner") return SlackKind::SoftCorner;
    throw ConfigError("unknown slack kind '" + name +
                      "' (expected quadratic|exponential|softcorner)");
}

}  // namespace atacom
