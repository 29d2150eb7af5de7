#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "nbv/error.hpp"

namespace nbv {

enum class EllipsoidKind { Occupied, Frontier };

inline const char* to_string(EllipsoidKind k) { return k == EllipsoidKind::Occupied ? "occupied" : "frontier"; }

/// Solid ellipsoid {x : (x - c)^T A (x - c) <= 1} with A symmetric positive definite.
template <typename Scalar>
struct Ellipsoid {
    using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
    using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
    using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;

    Vector3 center = Vector3::Zero();
    Matrix3 shape = Matrix3::Identity();
    EllipsoidKind kind = EllipsoidKind::Occupied;
    int member_count = 0;
    /// Position within its kind's list; used for deterministic tie-breaks.
    int cluster_index = 0;

    static Ellipsoid sphere(const Vector3& c, Scalar radius, EllipsoidKind kind = EllipsoidKind::Occupied) {
        Ellipsoid e;
        e.center = c;
        e.shape = Matrix3::Identity() / (radius * radius);
        e.kind = kind;
        return e;
    }

    Scalar form(const Vector3& x) const { return (x - center).dot(shape * (x - center)); }

    /// Homogeneous point quadric: X^T Q X = 0 on the surface, X = (x, 1).
    Matrix4 quadric() const {
        Matrix4 q;
        const Vector3 ac = shape * center;
        q.template topLeftCorner<3, 3>() = shape;
        q.template topRightCorner<3, 1>() = -ac;
        q.template bottomLeftCorner<1, 3>() = -ac.transpose();
        q(3, 3) = center.dot(ac) - Scalar(1);
        return q;
    }

    /// Q^{-1} in closed form: [[A^{-1} - c c^T, -c], [-c^T, -1]]. Throws
    /// GeometryError when A is not positive definite.
    Matrix4 dual_quadric() const {
        const Eigen::LLT<Matrix3> llt(shape);
        if (llt.info() != Eigen::Success) throw GeometryError("ellipsoid shape matrix is not positive definite");
        const Matrix3 inv = llt.solve(Matrix3::Identity());
        Matrix4 d;
        d.template topLeftCorner<3, 3>() = inv - center * center.transpose();
        d.template topRightCorner<3, 1>() = -center;
        d.template bottomLeftCorner<1, 3>() = -center.transpose();
        d(3, 3) = Scalar(-1);
        return d;
    }

    /// Semi-axis lengths (ascending) and their directions as columns.
    std::pair<Vector3, Matrix3> axes() const {
        Eigen::SelfAdjointEigenSolver<Matrix3> es(shape);
        Vector3 radii = es.eigenvalues().cwiseSqrt().cwiseInverse();
        return {radii, es.eigenvectors()};
    }

    Scalar volume() const {
        return Scalar(4) / Scalar(3) * std::numbers::pi_v<Scalar> / std::sqrt(shape.determinant());
    }
};

using Ellipsoidd = Ellipsoid<double>;

}  // namespace nbv
