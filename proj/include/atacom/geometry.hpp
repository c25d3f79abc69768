#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "atacom/errors.hpp"

namespace atacom {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Signed distance convention: negative strictly inside, zero on the
/// surface, positive outside. Gradients have unit norm off the medial axis.

struct Circle {
    Vec2 center{0.0, 0.0};
    double radius = 1.0;
};

struct Box {
    Vec2 center{0.0, 0.0};
    Vec2 half_extents{1.0, 1.0};
    double yaw = 0.0;
};

struct Capsule {
    Vec2 endpoint_a{0.0, 0.0};
    Vec2 endpoint_b{1.0, 0.0};
    double radius = 0.5;
};

/// Solid occupies { p : normal . p <= offset }; normal points out of the solid.
struct HalfPlane {
    Vec2 normal{0.0, 1.0};
    double offset = 0.0;
};

using SdfShape = std::variant<Circle, Box, Capsule, HalfPlane>;

struct SdfResult {
    double distance = 0.0;
    Vec2 gradient{0.0, 0.0};
};

namespace detail {

inline Eigen::Matrix2d rot2(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Eigen::Matrix2d r;
    r << c, -s, s, c;
    return r;
}

inline SdfResult circle_sdf(const Circle& sh, const Vec2& p) {
    const Vec2 d = p - sh.center;
    const double n = d.norm();
    if (n < 1e-300) return {-sh.radius, Vec2(1.0, 0.0)};  // center: pick a direction
    return {n - sh.radius, d / n};
}

inline SdfResult box_sdf(const Box& sh, const Vec2& p) {
    const Eigen::Matrix2d r = rot2(sh.yaw);
    const Vec2 q = r.transpose() * (p - sh.center);  // box frame
    const Vec2 qa = q.cwiseAbs();
    const Vec2 w = qa - sh.half_extents;
    Vec2 grad_local;
    double dist;
    if (w.x() > 0.0 || w.y() > 0.0) {
        const Vec2 outside = w.cwiseMax(0.0);
        dist = outside.norm() + std::min(std::max(w.x(), w.y()), 0.0);
        grad_local = outside / outside.norm();
    } else {
        // interior: nearest face along the axis of largest w
        if (w.x() > w.y()) {
            dist = w.x();
            grad_local = Vec2(1.0, 0.0);
        } else {
            dist = w.y();
            grad_local = Vec2(0.0, 1.0);
        }
    }
    grad_local.x() *= (q.x() >= 0.0 ? 1.0 : -1.0);
    grad_local.y() *= (q.y() >= 0.0 ? 1.0 : -1.0);
    return {dist, r * grad_local};
}

inline SdfResult capsule_sdf(const Capsule& sh, const Vec2& p) {
    const Vec2 ab = sh.endpoint_b - sh.endpoint_a;
    const double len2 = ab.squaredNorm();
    double t = len2 > 0.0 ? (p - sh.endpoint_a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 closest = sh.endpoint_a + t * ab;
    const Vec2 d = p - closest;
    const double n = d.norm();
    if (n < 1e-300) {
        // on the spine: any perpendicular is a valid descent direction
        Vec2 perp = len2 > 0.0 ? Vec2(-ab.y(), ab.x()).normalized() : Vec2(1.0, 0.0);
        return {-sh.radius, perp};
    }
    return {n - sh.radius, d / n};
}

inline SdfResult halfplane_sdf(const HalfPlane& sh, const Vec2& p) {
    return {sh.normal.dot(p) - sh.offset, sh.normal};
}

}  // namespace detail

/// Signed distance and gradient of one shape at p (both in the shape's frame).
inline SdfResult shape_sdf(const SdfShape& shape, const Vec2& p) {
    return std::visit(
        [&p](const auto& sh) -> SdfResult {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, Circle>) return detail::circle_sdf(sh, p);
            else if constexpr (std::is_same_v<T, Box>) return detail::box_sdf(sh, p);
            else if constexpr (std::is_same_v<T, Capsule>) return detail::capsule_sdf(sh, p);
            else return detail::halfplane_sdf(sh, p);
        },
        shape);
}

/// Validates shape parameters (positive radii/extents, unit normal).
inline void validate_shape(const SdfShape& shape) {
    std::visit(
        [](const auto& sh) {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, Circle>) {
                if (!(sh.radius > 0.0)) throw DomainError("circle: radius must be positive");
            } else if constexpr (std::is_same_v<T, Box>) {
                if (!(sh.half_extents.x() > 0.0) || !(sh.half_extents.y() > 0.0))
                    throw DomainError("box: half_extents must be positive");
            } else if constexpr (std::is_same_v<T, Capsule>) {
                if (!(sh.radius > 0.0)) throw DomainError("capsule: radius must be positive");
            } else {
                if (std::abs(sh.normal.norm() - 1.0) > 1e-9)
                    throw DomainError("half_plane: normal must be a unit vector");
            }
        },
        shape);
}

/// Rigid planar pose of a whole scene (the uncontrollable configuration).
struct ScenePose {
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;

    Vec3 params() const { return Vec3(x, y, yaw); }
    static ScenePose from_params(const Vec3& v) { return {v[0], v[1], v[2]}; }
};

/// Collection of shapes under one rigid pose, with the pose's velocity.
/// Immutable after construction; queries are pure. Moving obstacles are
/// modelled by constructing the per-step pose, not by mutation.
struct SdfScene {
    std::vector<SdfShape> shapes;
    ScenePose pose;
    Vec3 pose_velocity{0.0, 0.0, 0.0};
};

/// Scene signed distance (min over shapes) and world-frame gradient taken
/// from the minimizing shape; ties broken by lowest shape index.
inline SdfResult sdf_query(const SdfScene& scene, const Vec2& p) {
    const Eigen::Matrix2d r = detail::rot2(scene.pose.yaw);
    const Vec2 t(scene.pose.x, scene.pose.y);
    const Vec2 p_local = r.transpose() * (p - t);

    SdfResult best{std::numeric_limits<double>::infinity(), Vec2(0.0, 0.0)};
    for (const auto& shape : scene.shapes) {
        SdfResult res = shape_sdf(shape, p_local);
        if (res.distance < best.distance) best = res;
    }
    best.gradient = r * best.gradient;
    return best;
}

/// Row of partial derivatives of the scene distance w.r.t. the pose
/// parameters (x, y, yaw). Translation entries are the negated world
/// gradient; the yaw entry is the lever-arm term in the scene frame.
inline Eigen::RowVector3d sdf_scene_jacobian_pose(const SdfScene& scene, const Vec2& p) {
    const Eigen::Matrix2d r = detail::rot2(scene.pose.yaw);
    const Vec2 t(scene.pose.x, scene.pose.y);
    const Vec2 p_local = r.transpose() * (p - t);

    SdfResult best{std::numeric_limits<double>::infinity(), Vec2(0.0, 0.0)};
    for (const auto& shape : scene.shapes) {
        SdfResult res = shape_sdf(shape, p_local);
        if (res.distance < best.distance) best = res;
    }
    const Vec2 grad_world = r * best.gradient;
    // d p_local / d yaw = -S p_local with S the 90-degree rotation generator
    const Vec2 s_p(-p_local.y(), p_local.x());
    Eigen::RowVector3d jac;
    jac << -grad_world.x(), -grad_world.y(), -best.gradient.dot(s_p);
    return jac;
}

}  // namespace atacom
