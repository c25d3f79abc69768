#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "atacom/errors.hpp"
#include "atacom/slack.hpp"
#include "atacom/systems.hpp"

namespace atacom {

enum class ConstraintKind { Inequality, Equality };

/// One scalar constraint c(q, x) with analytic Jacobian rows w.r.t. the
/// controllable state q and the uncontrollable state x. Inequalities carry
/// a slack model; equalities have a structurally zero slack row.
struct Constraint {
    ConstraintKind kind = ConstraintKind::Inequality;
    std::string name;
    std::function<double(const Vector& q, const Vector& x)> value;
    std::function<Vector(const Vector& q, const Vector& x)> jac_q;  ///< size n
    std::function<Vector(const Vector& q, const Vector& x)> jac_x;  ///< size m
    SlackModel slack;
};

/// Stacked constraint functions over fixed dimensions (n, m).
struct ConstraintSet {
    int q_dim = 0;
    int x_dim = 0;
    std::vector<Constraint> items;

    int size() const { return static_cast<int>(items.size()); }

    Vector values(const Vector& q, const Vector& x) const {
        Vector c(size());
        for (int i = 0; i < size(); ++i) c[i] = items[i].value(q, x);
        return c;
    }

    Matrix jacobian_q(const Vector& q, const Vector& x) const {
        Matrix jac(size(), q_dim);
        for (int i = 0; i < size(); ++i) {
            Vector row = items[i].jac_q(q, x);
            if (row.size() != q_dim) throw DimensionError("constraint '" + items[i].name +
                                                          "': jac_q has wrong size");
            jac.row(i) = row.transpose();
        }
        return jac;
    }

    Matrix jacobian_x(const Vector& q, const Vector& x) const {
        Matrix jac(size(), x_dim);
        for (int i = 0; i < size(); ++i) {
            if (!items[i].jac_x) {
                jac.row(i).setZero();
                continue;
            }
            Vector row = items[i].jac_x(q, x);
            if (row.size() != x_dim) throw DimensionError("constraint '" + items[i].name +
                                                          "': jac_x has wrong size");
            jac.row(i) = row.transpose();
        }
        return jac;
    }
};

/// Helper for constraints that ignore the uncontrollable state.
inline std::function<Vector(const Vector&, const Vector&)> zero_jac_x() {
    return nullptr;
}

}  // namespace atacom
