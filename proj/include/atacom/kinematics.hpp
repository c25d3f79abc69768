#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "atacom/errors.hpp"
#include "atacom/geometry.hpp"
#include "atacom/systems.hpp"

namespace atacom {

/// Body-fixed query point on the arm: a fraction along one link, with a
/// clearance radius used when forming distance constraints.
struct PointOfInterest {
    int link = 0;            ///< owning link index
    double fraction = 1.0;   ///< position along the link, in [0, 1]
    double clearance = 0.0;  ///< threshold delta for distance constraints
};

/// Planar revolute chain. Joint angles are relative; link i rotates by the
/// sum of base yaw and joints 0..i.
struct PlanarArm {
    std::vector<double> link_lengths;
    Vec2 base_position{0.0, 0.0};
    double base_yaw = 0.0;
    std::vector<PointOfInterest> pois;

    int num_joints() const { return static_cast<int>(link_lengths.size()); }

    void validate() const {
        for (double len : link_lengths)
            if (!(len > 0.0)) throw DomainError("arm: link lengths must be positive");
        for (const auto& poi : pois) {
            if (poi.link < 0 || poi.link >= num_joints())
                throw IndexError("arm: poi link index out of range");
            if (poi.fraction < 0.0 || poi.fraction > 1.0)
                throw DomainError("arm: poi fraction must be in [0, 1]");
            if (poi.clearance < 0.0)
                throw DomainError("arm: poi clearance must be non-negative");
        }
    }
};

namespace detail {

inline void check_fk_args(const PlanarArm& arm, const Vector& joints, int poi_index) {
    if (poi_index < 0 || poi_index >= static_cast<int>(arm.pois.size()))
        throw IndexError("fk: poi index " + std::to_string(poi_index) + " out of range");
    if (joints.size() != arm.num_joints())
        throw DimensionError("fk: joint vector size must equal number of links");
}

}  // namespace detail

/// Workspace position of PoI i at the given joint configuration.
inline Vec2 fk_poi(const PlanarArm& arm, const Vector& joints, int poi_index) {
    detail::check_fk_args(arm, joints, poi_index);
    const auto& poi = arm.pois[poi_index];
    Vec2 p = arm.base_position;
    double angle = arm.base_yaw;
    for (int j = 0; j < poi.link; ++j) {
        angle += joints[j];
        p += arm.link_lengths[j] * Vec2(std::cos(angle), std::sin(angle));
    }
    angle += joints[poi.link];
    p += poi.fraction * arm.link_lengths[poi.link] * Vec2(std::cos(angle), std::sin(angle));
    return p;
}

/// 2 x n_joints Jacobian of fk_poi. Column j is the planar z-cross lever arm
/// perp(p - joint_j) for joints at or before the owning link, zero after.
inline Eigen::Matrix2Xd fk_jacobian(const PlanarArm& arm, const Vector& joints, int poi_index) {
    detail::check_fk_args(arm, joints, poi_index);
    const auto& poi = arm.pois[poi_index];
    const int n = arm.num_joints();

    // joint positions along the chain
    std::vector<Vec2> joint_pos(n);
    Vec2 p = arm.base_position;
    double angle = arm.base_yaw;
    for (int j = 0; j < n; ++j) {
        joint_pos[j] = p;
        angle += joints[j];
        p += arm.link_lengths[j] * Vec2(std::cos(angle), std::sin(angle));
    }
    const Vec2 poi_pos = fk_poi(arm, joints, poi_index);

    Eigen::Matrix2Xd jac = Eigen::Matrix2Xd::Zero(2, n);
    for (int j = 0; j <= poi.link; ++j) {
        const Vec2 r = poi_pos - joint_pos[j];
        jac.col(j) = Vec2(-r.y(), r.x());
    }
    return jac;
}

/// Default PoI layout: midpoint and end of every link, uniform clearance.
inline std::vector<PointOfInterest> default_pois(int num_links, double clearance) {
    std::vector<PointOfInterest> pois;
    pois.reserve(2 * num_links);
    for (int link = 0; link < num_links; ++link) {
        pois.push_back({link, 0.5, clearance});
        pois.push_back({link, 1.0, clearance});
    }
    return pois;
}

}  // namespace atacom
