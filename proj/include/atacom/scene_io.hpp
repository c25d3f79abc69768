#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "atacom/errors.hpp"
#include "atacom/geometry.hpp"

namespace atacom {

/// JSON scene schema:
/// {
///   "pose": {"x": 0.0, "y": 0.0, "yaw": 0.0},            // optional
///   "pose_velocity": [0.0, 0.0, 0.0],                     // optional
///   "shapes": [
///     {"type": "circle",     "center": [x, y], "radius": r},
///     {"type": "box",        "center": [x, y], "half_extents": [hx, hy], "yaw": a},
///     {"type": "capsule",    "endpoint_a": [x, y], "endpoint_b": [x, y], "radius": r},
///     {"type": "half_plane", "normal": [nx, ny], "offset": d}
///   ]
/// }

namespace detail {

inline Vec2 vec2_from_json(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(std::string("scene: ") + what + " must be a [x, y] array");
    return Vec2(j[0].get<double>(), j[1].get<double>());
}

inline void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const char* ctx) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known)
            throw ConfigError(std::string("scene: unknown key '") + it.key() + "' in " + ctx);
    }
}

}  // namespace detail

inline SdfShape shape_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    SdfShape shape;
    if (type == "circle") {
        detail::require_keys(j, {"type", "center", "radius"}, "circle");
        shape = Circle{detail::vec2_from_json(j.at("center"), "center"),
                       j.at("radius").get<double>()};
    } else if (type == "box") {
        detail::require_keys(j, {"type", "center", "half_extents", "yaw"}, "box");
        shape = Box{detail::vec2_from_json(j.at("center"), "center"),
                    detail::vec2_from_json(j.at("half_extents"), "half_extents"),
                    j.value("yaw", 0.0)};
    } else if (type == "capsule") {
        detail::require_keys(j, {"type", "endpoint_a", "endpoint_b", "radius"}, "capsule");
        shape = Capsule{detail::vec2_from_json(j.at("endpoint_a"), "endpoint_a"),
                        detail::vec2_from_json(j.at("endpoint_b"), "endpoint_b"),
                        j.at("radius").get<double>()};
    } else if (type == "half_plane") {
        detail::require_keys(j, {"type", "normal", "offset"}, "half_plane");
        Vec2 n = detail::vec2_from_json(j.at("normal"), "normal");
        const double norm = n.norm();
        if (!(norm > 0.0)) throw ConfigError("scene: half_plane normal must be nonzero");
        shape = HalfPlane{n / norm, j.at("offset").get<double>()};
    } else {
        throw ConfigError("scene: unknown shape type '" + type + "'");
    }
    validate_shape(shape);
    return shape;
}

inline nlohmann::json shape_to_json(const SdfShape& shape) {
    nlohmann::json j;
    std::visit(
        [&j](const auto& sh) {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, Circle>) {
                j = {{"type", "circle"},
                     {"center", {sh.center.x(), sh.center.y()}},
                     {"radius", sh.radius}};
            } else if constexpr (std::is_same_v<T, Box>) {
                j = {{"type", "box"},
                     {"center", {sh.center.x(), sh.center.y()}},
                     {"half_extents", {sh.half_extents.x(), sh.half_extents.y()}},
                     {"yaw", sh.yaw}};
            } else if constexpr (std::is_same_v<T, Capsule>) {
                j = {{"type", "capsule"},
                     {"endpoint_a", {sh.endpoint_a.x(), sh.endpoint_a.y()}},
                     {"endpoint_b", {sh.endpoint_b.x(), sh.endpoint_b.y()}},
                     {"radius", sh.radius}};
            } else {
                j = {{"type", "half_plane"},
                     {"normal", {sh.normal.x(), sh.normal.y()}},
                     {"offset", sh.offset}};
            }
        },
        shape);
    return j;
}

inline SdfScene scene_from_json(const nlohmann::json& j) {
    detail::require_keys(j, {"pose", "pose_velocity", "shapes"}, "scene");
    SdfScene scene;
    if (j.contains("pose")) {
        const auto& p = j.at("pose");
        detail::require_keys(p, {"x", "y", "yaw"}, "pose");
        scene.pose = {p.value("x", 0.0), p.value("y", 0.0), p.value("yaw", 0.0)};
    }
    if (j.contains("pose_velocity")) {
        const auto& v = j.at("pose_velocity");
        if (!v.is_array() || v.size() != 3)
            throw ConfigError("scene: pose_velocity must be a [vx, vy, vyaw] array");
        scene.pose_velocity = Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
    }
    for (const auto& js : j.at("shapes")) scene.shapes.push_back(shape_from_json(js));
    return scene;
}

inline nlohmann::json scene_to_json(const SdfScene& scene) {
    nlohmann::json j;
    j["pose"] = {{"x", scene.pose.x}, {"y", scene.pose.y}, {"yaw", scene.pose.yaw}};
    j["pose_velocity"] = {scene.pose_velocity[0], scene.pose_velocity[1],
                          scene.pose_velocity[2]};
    j["shapes"] = nlohmann::json::array();
    for (const auto& sh : scene.shapes) j["shapes"].push_back(shape_to_json(sh));
    return j;
}

inline SdfScene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scene: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("scene: parse failure in '" + path + "': " + e.what());
    }
    return scene_from_json(j);
}

inline void save_scene(const SdfScene& scene, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("scene: cannot write '" + path + "'");
    out << scene_to_json(scene).dump(2) << "\n";
}

}  // namespace atacom
