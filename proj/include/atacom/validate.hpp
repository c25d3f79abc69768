#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "atacom/controller.hpp"
#include "atacom/envs/nav_env.hpp"
#include "atacom/envs/reach_env.hpp"
#include "atacom/geometry.hpp"
#include "atacom/kinematics.hpp"
#include "atacom/slack.hpp"
#include "atacom/tangent.hpp"

namespace atacom {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;  ///< worst error observed, or the failure reason
};

namespace detail {

inline Vector fd_grad(const std::function<double(const Vector&)>& f, const Vector& p,
                      double h = 1e-6) {
    Vector g(p.size());
    for (int i = 0; i < p.size(); ++i) {
        Vector hi = p, lo = p;
        hi[i] += h;
        lo[i] -= h;
        g[i] = (f(hi) - f(lo)) / (2.0 * h);
    }
    return g;
}

/// Margin between the best and second-best shape distance; small values mark
/// points where the min-union gradient is not differentiable.
inline double scene_tie_gap(const SdfScene& scene, const Vec2& p) {
    const Eigen::Matrix2d r = rot2(scene.pose.yaw);
    const Vec2 p_local = r.transpose() * (p - Vec2(scene.pose.x, scene.pose.y));
    double best = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    for (const auto& shape : scene.shapes) {
        const double d = shape_sdf(shape, p_local).distance;
        if (d < best) {
            second = best;
            best = d;
        } else if (d < second) {
            second = d;
        }
    }
    return second - best;
}

template <typename Fn>
inline CheckResult run_check(const std::string& name, Fn&& fn) {
    CheckResult res;
    res.name = name;
    try {
        double worst = 0.0;
        res.passed = fn(worst);
        std::ostringstream os;
        os.precision(3);
        os << std::scientific << "max err " << worst;
        res.detail = res.passed ? os.str() : (std::string("FAILED, ") + os.str());
    } catch (const std::exception& e) {
        res.passed = false;
        res.detail = std::string("exception: ") + e.what();
    }
    return res;
}

}  // namespace detail

/// Deterministic internal consistency suite: every analytic derivative in the
/// library is replayed against finite differences or an algebraic identity.
inline std::vector<CheckResult> run_validation() {
    std::vector<CheckResult> out;

    out.push_back(detail::run_check("slack-round-trip", [](double& worst) {
        for (SlackKind kind :
             {SlackKind::Quadratic, SlackKind::Exponential, SlackKind::SoftCorner}) {
            for (double beta : {0.5, 1.0, 3.0}) {
                const SlackModel model(kind, beta);
                for (double c = -10.0; c < -1e-6; c = c * 0.5 + 1e-7) {
                    const double mu = slack_inverse(model, c);
                    worst = std::max(worst, std::abs(slack_value(model, mu) + c));
                }
            }
        }
        return worst <= 1e-9;
    }));

    out.push_back(detail::run_check("slack-derivative", [](double& worst) {
        for (SlackKind kind :
             {SlackKind::Quadratic, SlackKind::Exponential, SlackKind::SoftCorner}) {
            const SlackModel model(kind, 1.5);
            for (double mu = -20.0; mu <= 20.0; mu += 0.37) {
                const double h = 1e-6;
                const double fd =
                    (slack_value(model, mu + h) - slack_value(model, mu - h)) / (2.0 * h);
                const double an = slack_derivative(model, mu);
                worst = std::max(worst, std::abs(fd - an) / (1.0 + std::abs(an)));
            }
        }
        return worst <= 1e-6;
    }));

    out.push_back(detail::run_check("null-space-annihilation", [](double& worst) {
        std::mt19937_64 rng(11);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            const int k = 1 + static_cast<int>(rng() % 4);
            const int u = k + 1 + static_cast<int>(rng() % 3);
            Matrix jac(k, k + u);
            for (int i = 0; i < jac.size(); ++i) jac(i / jac.cols(), i % jac.cols()) = gauss(rng);
            if (jacobian_condition(jac) > 1e6) continue;
            const Matrix basis = projected_null_space(jac, 0.0);
            worst = std::max(worst, (jac * basis).cwiseAbs().maxCoeff());
        }
        return worst <= 1e-8;
    }));

    out.push_back(detail::run_check("qr-kernel-orthonormal", [](double& worst) {
        std::mt19937_64 rng(12);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            const int k = 1 + static_cast<int>(rng() % 3);
            const int cols = k + 1 + static_cast<int>(rng() % 3);
            Matrix jac(k, cols);
            for (int r = 0; r < k; ++r)
                for (int c = 0; c < cols; ++c) jac(r, c) = gauss(rng);
            if (jacobian_condition(jac) > 1e6) continue;
            const Matrix basis = qr_null_space(jac);
            worst = std::max(worst, (jac * basis).cwiseAbs().maxCoeff());
            const Matrix gram = basis.transpose() * basis;
            worst = std::max(
                worst, (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff());
        }
        return worst <= 1e-9;
    }));

    out.push_back(detail::run_check("sdf-gradient", [](double& worst) {
        SdfScene scene;
        scene.shapes = {Circle{Vec2(1.0, 0.5), 0.6}, Box{Vec2(-1.5, 1.0), Vec2(0.8, 0.5), 0.3},
                        Capsule{Vec2(-1.0, -1.5), Vec2(1.0, -2.0), 0.4},
                        HalfPlane{Vec2(0.0, 1.0), -3.0}};
        scene.pose = {0.3, -0.2, 0.25};
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> coord(-4.0, 4.0);
        int used = 0;
        for (int trial = 0; trial < 2000 && used < 500; ++trial) {
            const Vec2 p(coord(rng), coord(rng));
            const SdfResult res = sdf_query(scene, p);
            if (std::abs(res.distance) < 1e-3) continue;
            if (detail::scene_tie_gap(scene, p) < 1e-3) continue;
            ++used;
            const Vector fd = detail::fd_grad(
                [&scene](const Vector& v) {
                    return sdf_query(scene, Vec2(v[0], v[1])).distance;
                },
                (Vector(2) << p.x(), p.y()).finished());
            worst = std::max(worst, (fd - Vector(res.gradient)).norm());
        }
        return used >= 400 && worst <= 1e-4;
    }));

    out.push_back(detail::run_check("sdf-pose-jacobian", [](double& worst) {
        SdfScene scene;
        scene.shapes = {Circle{Vec2(0.5, 0.0), 0.4}, Box{Vec2(-1.0, 0.8), Vec2(0.6, 0.4), 0.1}};
        scene.pose = {0.2, -0.4, 0.7};
        std::mt19937_64 rng(14);
        std::uniform_real_distribution<double> coord(-3.0, 3.0);
        int used = 0;
        for (int trial = 0; trial < 1500 && used < 300; ++trial) {
            const Vec2 p(coord(rng), coord(rng));
            if (std::abs(sdf_query(scene, p).distance) < 1e-3) continue;
            if (detail::scene_tie_gap(scene, p) < 1e-3) continue;
            ++used;
            const Eigen::RowVector3d jac = sdf_scene_jacobian_pose(scene, p);
            const Vector fd = detail::fd_grad(
                [&scene, &p](const Vector& v) {
                    SdfScene moved = scene;
                    moved.pose = ScenePose::from_params(Vec3(v[0], v[1], v[2]));
                    return sdf_query(moved, p).distance;
                },
                Vector(scene.pose.params()));
            worst = std::max(worst, (fd.transpose() - jac).cwiseAbs().maxCoeff());
        }
        return used >= 200 && worst <= 1e-4;
    }));

    out.push_back(detail::run_check("arm-jacobian", [](double& worst) {
        std::mt19937_64 rng(15);
        std::uniform_real_distribution<double> angle(-2.5, 2.5);
        std::uniform_real_distribution<double> len(0.4, 1.6);
        for (int trial = 0; trial < 200; ++trial) {
            PlanarArm arm;
            const int n = 1 + static_cast<int>(rng() % 4);
            for (int i = 0; i < n; ++i) arm.link_lengths.push_back(len(rng));
            arm.pois = default_pois(n, 0.05);
            Vector q(n);
            for (int i = 0; i < n; ++i) q[i] = angle(rng);
            for (size_t poi = 0; poi < arm.pois.size(); ++poi) {
                const Matrix jac = fk_jacobian(arm, q, static_cast<int>(poi));
                for (int axis = 0; axis < 2; ++axis) {
                    const Vector fd = detail::fd_grad(
                        [&arm, poi, axis](const Vector& v) {
                            return fk_poi(arm, v, static_cast<int>(poi))[axis];
                        },
                        q);
                    worst = std::max(worst,
                                     (fd.transpose() - jac.row(axis)).cwiseAbs().maxCoeff());
                }
            }
        }
        return worst <= 1e-6;
    }));

    out.push_back(detail::run_check("nav-constraint-jacobian", [](double& worst) {
        NavEnv2D env;
        const ConstraintSet& cs = env.constraint_set();
        std::mt19937_64 rng(16);
        std::uniform_real_distribution<double> pos(-4.0, 4.0);
        std::uniform_real_distribution<double> ang(-3.0, 3.0);
        for (int trial = 0; trial < 100; ++trial) {
            Vector q(3), x(5);
            q << pos(rng), pos(rng), ang(rng);
            x << pos(rng), pos(rng), 0.0, pos(rng), pos(rng);
            if ((q.head<2>() - x.head(2)).norm() < 1e-2) continue;
            const Matrix jq = cs.jacobian_q(q, x);
            const Matrix jx = cs.jacobian_x(q, x);
            for (int i = 0; i < cs.size(); ++i) {
                const Vector fq = detail::fd_grad(
                    [&cs, &x, i](const Vector& v) { return cs.items[i].value(v, x); }, q);
                const Vector fx = detail::fd_grad(
                    [&cs, &q, i](const Vector& v) { return cs.items[i].value(q, v); }, x);
                worst = std::max(worst, (fq.transpose() - jq.row(i)).cwiseAbs().maxCoeff());
                worst = std::max(worst, (fx.transpose() - jx.row(i)).cwiseAbs().maxCoeff());
            }
        }
        return worst <= 1e-4;
    }));

    out.push_back(detail::run_check("reach-constraint-jacobian", [](double& worst) {
        ReachEnv2D env;
        const ConstraintSet& cs = env.constraint_set();
        const SdfScene& scene = env.params().scene;
        const PlanarArm& arm = env.arm();
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> ang(-2.6, 2.6);
        int used = 0;
        for (int trial = 0; trial < 400 && used < 100; ++trial) {
            Vector q(3), x(2);
            q << ang(rng), ang(rng), ang(rng);
            x << ang(rng), ang(rng);
            bool near_tie = false;
            for (size_t poi = 0; poi < arm.pois.size(); ++poi) {
                const Vec2 p = fk_poi(arm, q, static_cast<int>(poi));
                if (detail::scene_tie_gap(scene, p) < 1e-3 ||
                    std::abs(sdf_query(scene, p).distance) < 1e-3)
                    near_tie = true;
            }
            if (near_tie) continue;
            ++used;
            const Matrix jq = cs.jacobian_q(q, x);
            for (int i = 0; i < cs.size(); ++i) {
                const Vector fq = detail::fd_grad(
                    [&cs, &x, i](const Vector& v) { return cs.items[i].value(v, x); }, q);
                worst = std::max(worst, (fq.transpose() - jq.row(i)).cwiseAbs().maxCoeff());
            }
        }
        return used >= 50 && worst <= 1e-4;
    }));

    out.push_back(detail::run_check("drive-nonholonomy", [](double& worst) {
        const AffineSystem sys = differential_drive();
        std::mt19937_64 rng(18);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (int trial = 0; trial < 500; ++trial) {
            Vector q(3), a(2);
            q << 5.0 * uni(rng), 5.0 * uni(rng), 3.0 * uni(rng);
            a << uni(rng), uni(rng);
            const Vector qd = sys.drift(q) + sys.input_matrix(q) * a;
            worst = std::max(worst,
                             std::abs(qd[0] * std::sin(q[2]) - qd[1] * std::cos(q[2])));
        }
        return worst <= 1e-14;
    }));

    out.push_back(detail::run_check("nav-constraint-rate", [](double& worst) {
        NavEnv2D env;
        AtacomController ctrl;
        ctrl.system = env.affine_system();
        ctrl.constraints = env.constraint_set();
        ctrl.damping = 0.0;
        std::mt19937_64 rng(19);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        int used = 0;
        for (int ep = 0; ep < 20; ++ep) {
            const EnvState st = env.reset(900 + ep);
            Vector alpha(2);
            alpha << 0.3 * uni(rng), 0.3 * uni(rng);
            const auto [a, diag] = compute_safe_action(ctrl, st.q, st.x, st.x_dot, alpha);
            if (diag.saturated || diag.clamped) continue;
            ++used;
            const ConstraintSet& cs = ctrl.constraints;
            Vector mu(cs.size());
            const Vector c = cs.values(st.q, st.x);
            for (int i = 0; i < cs.size(); ++i) mu[i] = slack_inverse(cs.items[i].slack, c[i]);
            Vector sprime(cs.size());
            for (int i = 0; i < cs.size(); ++i)
                sprime[i] = slack_derivative(cs.items[i].slack, mu[i]);
            const Vector qd = ctrl.system.drift(st.q) + ctrl.system.input_matrix(st.q) * a;
            const Vector rate = cs.jacobian_q(st.q, st.x) * qd +
                                cs.jacobian_x(st.q, st.x) * st.x_dot +
                                sprime.asDiagonal() * diag.mu_dot;
            worst = std::max(worst, rate.cwiseAbs().maxCoeff());
        }
        return used >= 10 && worst <= 1e-8;
    }));

    out.push_back(detail::run_check("reach-constraint-rate", [](double& worst) {
        ReachEnv2D env;
        AtacomController ctrl;
        ctrl.system = env.affine_system();
        ctrl.constraints = env.constraint_set();
        ctrl.damping = 0.0;
        std::mt19937_64 rng(20);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        int used = 0;
        for (int ep = 0; ep < 20; ++ep) {
            const EnvState st = env.reset(4100 + ep);
            Vector alpha(3);
            alpha << 0.3 * uni(rng), 0.3 * uni(rng), 0.3 * uni(rng);
            const auto [a, diag] = compute_safe_action(ctrl, st.q, st.x, st.x_dot, alpha);
            if (diag.saturated || diag.clamped) continue;
            ++used;
            const ConstraintSet& cs = ctrl.constraints;
            const Vector c = cs.values(st.q, st.x);
            Vector sprime(cs.size());
            for (int i = 0; i < cs.size(); ++i)
                sprime[i] =
                    slack_derivative(cs.items[i].slack, slack_inverse(cs.items[i].slack, c[i]));
            const Vector qd = ctrl.system.drift(st.q) + ctrl.system.input_matrix(st.q) * a;
            const Vector rate = cs.jacobian_q(st.q, st.x) * qd +
                                cs.jacobian_x(st.q, st.x) * st.x_dot +
                                sprime.asDiagonal() * diag.mu_dot;
            worst = std::max(worst, rate.cwiseAbs().maxCoeff());
        }
        return used >= 10 && worst <= 1e-8;
    }));

    return out;
}

inline bool all_passed(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.passed) return false;
    return true;
}

}  // namespace atacom
