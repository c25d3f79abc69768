#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "atacom/kinematics.hpp"
#include "support.hpp"

using atacom::PlanarArm;
using atacom::PointOfInterest;
using atacom::Vec2;
using atacom::Vector;

namespace {

PlanarArm two_link_arm() {
    PlanarArm arm;
    arm.link_lengths = {1.0, 1.0};
    arm.pois = {PointOfInterest{0, 0.0, 0.0},   // base of link 1
                PointOfInterest{0, 1.0, 0.0},   // elbow
                PointOfInterest{1, 1.0, 0.0}};  // tip
    return arm;
}

Vector joints2(double a, double b) {
    Vector q(2);
    q << a, b;
    return q;
}

}  // namespace

TEST_CASE("straight arm reaches along the x axis", "[kinematics]") {
    PlanarArm arm = two_link_arm();
    Vec2 tip = atacom::fk_poi(arm, joints2(0.0, 0.0), 2);
    REQUIRE(tip.x() == Catch::Approx(2.0).epsilon(1e-14));
    REQUIRE(tip.y() == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("rotating the shoulder rotates the whole chain", "[kinematics]") {
    PlanarArm arm = two_link_arm();
    Vec2 tip = atacom::fk_poi(arm, joints2(M_PI / 2.0, 0.0), 2);
    REQUIRE(tip.x() == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(tip.y() == Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("zero-fraction point on the first link sits at the base", "[kinematics]") {
    PlanarArm arm = two_link_arm();
    arm.base_position = Vec2(0.7, -0.3);
    for (double a = -3.0; a <= 3.0; a += 0.7) {
        for (double b = -3.0; b <= 3.0; b += 0.9) {
            Vec2 p = atacom::fk_poi(arm, joints2(a, b), 0);
            REQUIRE((p - arm.base_position).norm() <= 1e-15);
        }
    }
}

TEST_CASE("straight-arm tip jacobian has pure lever arms", "[kinematics]") {
    PlanarArm arm = two_link_arm();
    Eigen::Matrix2Xd jac = atacom::fk_jacobian(arm, joints2(0.0, 0.0), 2);
    REQUIRE(jac(0, 0) == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(jac(0, 1) == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(jac(1, 0) == Catch::Approx(2.0).epsilon(1e-14));
    REQUIRE(jac(1, 1) == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("distal joints do not move proximal points", "[kinematics]") {
    PlanarArm arm = two_link_arm();
    Eigen::Matrix2Xd jac = atacom::fk_jacobian(arm, joints2(0.4, -1.1), 1);
    REQUIRE(jac.col(1).norm() == 0.0);
}

TEST_CASE("fk jacobian matches central finite differences", "[kinematics]") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> len_dist(0.2, 2.0);
    std::uniform_real_distribution<double> ang_dist(-M_PI, M_PI);
    std::uniform_real_distribution<double> frac_dist(0.0, 1.0);
    std::uniform_int_distribution<int> n_dist(1, 5);

    for (int trial = 0; trial < 500; ++trial) {
        PlanarArm arm;
        const int n = n_dist(rng);
        for (int i = 0; i < n; ++i) arm.link_lengths.push_back(len_dist(rng));
        arm.base_position = Vec2(ang_dist(rng), ang_dist(rng));
        arm.base_yaw = ang_dist(rng);
        std::uniform_int_distribution<int> link_dist(0, n - 1);
        arm.pois = {PointOfInterest{link_dist(rng), frac_dist(rng), 0.0}};

        Vector joints(n);
        for (int i = 0; i < n; ++i) joints[i] = ang_dist(rng);

        Eigen::Matrix2Xd jac = atacom::fk_jacobian(arm, joints, 0);
        Eigen::MatrixXd fd = test_support::fd_jacobian(
            [&arm](const Eigen::VectorXd& q) -> Eigen::VectorXd {
                return atacom::fk_poi(arm, q, 0);
            },
            joints);
        REQUIRE((jac - fd).cwiseAbs().maxCoeff() <= 1e-6 * (1.0 + jac.norm()));
    }
}

TEST_CASE("points on one link keep their spacing", "[kinematics]") {
    PlanarArm arm;
    arm.link_lengths = {0.8, 1.3, 0.6};
    arm.pois = {PointOfInterest{1, 0.25, 0.0}, PointOfInterest{1, 0.9, 0.0}};
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> ang_dist(-M_PI, M_PI);
    const double ref = 0.65 * 1.3;
    for (int trial = 0; trial < 200; ++trial) {
        Vector joints(3);
        joints << ang_dist(rng), ang_dist(rng), ang_dist(rng);
        const double d =
            (atacom::fk_poi(arm, joints, 0) - atacom::fk_poi(arm, joints, 1)).norm();
        REQUIRE(std::abs(d - ref) <= 1e-12);
    }
}

TEST_CASE("no point leaves the reachable disc", "[kinematics]") {
    PlanarArm arm;
    arm.link_lengths = {0.5, 1.0, 0.75};
    arm.base_position = Vec2(1.0, 2.0);
    arm.pois = atacom::default_pois(3, 0.0);
    const double reach = 0.5 + 1.0 + 0.75;
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> ang_dist(-M_PI, M_PI);
    for (int trial = 0; trial < 200; ++trial) {
        Vector joints(3);
        joints << ang_dist(rng), ang_dist(rng), ang_dist(rng);
        for (int i = 0; i < static_cast<int>(arm.pois.size()); ++i) {
            const Vec2 p = atacom::fk_poi(arm, joints, i);
            REQUIRE((p - arm.base_position).norm() <= reach + 1e-12);
        }
    }
}

TEST_CASE("default points cover midpoint and end of each link", "[kinematics]") {
    auto pois = atacom::default_pois(3, 0.05);
    REQUIRE(pois.size() == 6);
    REQUIRE(pois[0].link == 0);
    REQUIRE(pois[0].fraction == 0.5);
    REQUIRE(pois[1].fraction == 1.0);
    REQUIRE(pois[5].link == 2);
    for (const auto& poi : pois) REQUIRE(poi.clearance == 0.05);
}

TEST_CASE("fk rejects bad indices and dimensions", "[kinematics]") {
    PlanarArm arm = two_link_arm();
    REQUIRE_THROWS_AS(atacom::fk_poi(arm, joints2(0.0, 0.0), 3), atacom::IndexError);
    REQUIRE_THROWS_AS(atacom::fk_poi(arm, joints2(0.0, 0.0), -1), atacom::IndexError);
    Vector three(3);
    three.setZero();
    REQUIRE_THROWS_AS(atacom::fk_poi(arm, three, 0), atacom::DimensionError);
    REQUIRE_THROWS_AS(atacom::fk_jacobian(arm, three, 0), atacom::DimensionError);
}

TEST_CASE("arm validation rejects bad descriptions", "[kinematics]") {
    PlanarArm arm;
    arm.link_lengths = {1.0, -1.0};
    REQUIRE_THROWS_AS(arm.validate(), atacom::DomainError);

    arm.link_lengths = {1.0, 1.0};
    arm.pois = {PointOfInterest{2, 0.5, 0.0}};
    REQUIRE_THROWS_AS(arm.validate(), atacom::IndexError);

    arm.pois = {PointOfInterest{0, 1.5, 0.0}};
    REQUIRE_THROWS_AS(arm.validate(), atacom::DomainError);

    arm.pois = {PointOfInterest{0, 0.5, -0.1}};
    REQUIRE_THROWS_AS(arm.validate(), atacom::DomainError);

    arm.pois = {PointOfInterest{0, 0.5, 0.1}};
    arm.validate();
}
