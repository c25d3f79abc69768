#pragma once

#include <stdexcept>
#include <string>

namespace atacom {

/// Input outside the mathematical domain of an operation (e.g. slack
/// inverse queried at or beyond the constraint boundary).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Action outside the declared action bounds of a system.
struct BoundsError : std::runtime_error {
    explicit BoundsError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Gram matrix J J^T numerically singular with zero damping requested.
struct SingularError : std::runtime_error {
    explicit SingularError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Rank-revealing factorization found a row-rank-deficient Jacobian.
struct RankError : std::runtime_error {
    explicit RankError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mismatched vector/matrix dimensions between caller and model.
struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid index into a point-of-interest or constraint list.
struct IndexError : std::runtime_error {
    explicit IndexError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Environment stepped after an episode already terminated.
struct StepAfterDone : std::runtime_error {
    explicit StepAfterDone(const std::string& msg) : std::runtime_error(msg) {}
};

/// Environment reset failed to find a feasible initial state.
struct InitFailure : std::runtime_error {
    explicit InitFailure(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or unknown configuration input.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace atacom
