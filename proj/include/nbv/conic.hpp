#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "nbv/ellipsoid.hpp"
#include "nbv/geometry.hpp"

namespace nbv {

/// Silhouette of an ellipsoid in the image.
template <typename Scalar>
struct ProjectedEllipse {
    using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
    using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

    /// Point conic, scaled so that points inside evaluate negative.
    Matrix3 conic = Matrix3::Zero();
    Matrix3 dual_conic = Matrix3::Zero();
    Vector2 center = Vector2::Zero();
    Vector2 semi_axes = Vector2::Zero();  // (major, minor), pixels
    Scalar orientation = 0;               // major axis angle from +u, radians
    Scalar clipped_area = 0;              // pixels^2 inside the image rectangle
    bool valid = false;

    /// Image-plane polygon with `segments` vertices on the ellipse.
    std::vector<Vector2> polygon(int segments) const {
        std::vector<Vector2> out;
        out.reserve(segments);
        const Scalar c = std::cos(orientation), s = std::sin(orientation);
        for (int i = 0; i < segments; ++i) {
            const Scalar t = Scalar(2) * std::numbers::pi_v<Scalar> * i / segments;
            const Scalar x = semi_axes.x() * std::cos(t), y = semi_axes.y() * std::sin(t);
            out.emplace_back(center.x() + c * x - s * y, center.y() + s * x + c * y);
        }
        return out;
    }

    bool inside(Scalar u, Scalar v) const {
        const Eigen::Matrix<Scalar, 3, 1> p(u, v, Scalar(1));
        return p.dot(conic * p) <= 0;
    }
};

/// 3x4 camera matrix P = K [R^T | -R^T t] for a camera-to-world pose.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 4> camera_matrix(const Pose<Scalar>& pose, const CameraIntrinsics& intrinsics) {
    return intrinsics.K().cast<Scalar>() * pose.world_to_camera();
}

/// Area of the convex polygon clipped to [x0, x1] x [y0, y1] (Sutherland-Hodgman + shoelace).
template <typename Scalar>
Scalar clipped_polygon_area(std::vector<Eigen::Matrix<Scalar, 2, 1>> poly, Scalar x0, Scalar y0, Scalar x1, Scalar y1) {
    using P = Eigen::Matrix<Scalar, 2, 1>;
    auto clip = [&](int axis, Scalar bound, bool keep_greater) {
        std::vector<P> out;
        const std::size_t n = poly.size();
        auto in = [&](const P& p) { return keep_greater ? p[axis] >= bound : p[axis] <= bound; };
        for (std::size_t i = 0; i < n; ++i) {
            const P& a = poly[i];
            const P& b = poly[(i + 1) % n];
            const bool ia = in(a), ib = in(b);
            if (ia) out.push_back(a);
            if (ia != ib) {
                const Scalar t = (bound - a[axis]) / (b[axis] - a[axis]);
                out.push_back(a + t * (b - a));
            }
        }
        poly = std::move(out);
    };
    clip(0, x0, true);
    if (!poly.empty()) clip(0, x1, false);
    if (!poly.empty()) clip(1, y0, true);
    if (!poly.empty()) clip(1, y1, false);
    if (poly.size() < 3) return 0;
    Scalar area = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const P& a = poly[i];
        const P& b = poly[(i + 1) % poly.size()];
        area += a.x() * b.y() - b.x() * a.y();
    }
    return std::abs(area) / 2;
}

/// Number of pixel centers of the image that fall inside the ellipse.
template <typename Scalar>
long rasterized_area(const ProjectedEllipse<Scalar>& e, const CameraIntrinsics& intrinsics) {
    if (!e.valid) return 0;
    const Scalar r = e.semi_axes.x();
    const int u0 = std::max(0, static_cast<int>(std::floor(e.center.x() - r)));
    const int u1 = std::min(intrinsics.width - 1, static_cast<int>(std::ceil(e.center.x() + r)));
    const int v0 = std::max(0, static_cast<int>(std::floor(e.center.y() - r)));
    const int v1 = std::min(intrinsics.height - 1, static_cast<int>(std::ceil(e.center.y() + r)));
    long count = 0;
    for (int v = v0; v <= v1; ++v)
        for (int u = u0; u <= u1; ++u)
            if (e.inside(Scalar(u), Scalar(v))) ++count;
    return count;
}

/// Projects an ellipsoid through a pinhole camera via the dual quadric,
/// Phi* = P Q^{-1} P^T. The result is invalid (area 0) unless the whole
/// ellipsoid lies strictly in front of the camera's principal plane.
template <typename Scalar>
ProjectedEllipse<Scalar> project_ellipsoid(const Ellipsoid<Scalar>& ellipsoid, const Pose<Scalar>& pose,
                                           const CameraIntrinsics& intrinsics, int segments = 256) {
    using V3 = Eigen::Matrix<Scalar, 3, 1>;
    using M3 = Eigen::Matrix<Scalar, 3, 3>;
    ProjectedEllipse<Scalar> out;

    const Eigen::Matrix<Scalar, 4, 4> dual = ellipsoid.dual_quadric();  // throws on singular shape
    const V3 axis = pose.optical_axis();
    const Scalar depth = axis.dot(ellipsoid.center - pose.translation);
    const M3 shape_inv = dual.template topLeftCorner<3, 3>() + ellipsoid.center * ellipsoid.center.transpose();
    const Scalar half_extent = std::sqrt(std::max(Scalar(0), axis.dot(shape_inv * axis)));
    if (!(depth > half_extent)) return out;

    const Eigen::Matrix<Scalar, 3, 4> P = camera_matrix(pose, intrinsics);
    M3 dual_conic = P * dual * P.transpose();
    dual_conic = Scalar(0.5) * (dual_conic + dual_conic.transpose());
    M3 conic = dual_conic.inverse();
    conic /= conic.cwiseAbs().maxCoeff();

    const Eigen::Matrix<Scalar, 2, 2> m = conic.template topLeftCorner<2, 2>();
    const Eigen::Matrix<Scalar, 2, 1> b = conic.template topRightCorner<2, 1>();
    if (!(m.determinant() > 0)) return out;
    const Eigen::Matrix<Scalar, 2, 1> c = -m.ldlt().solve(b);
    const Scalar f = conic(2, 2) + b.dot(c);
    // (x - c)^T m (x - c) = -f must describe a real ellipse.
    const Eigen::Matrix<Scalar, 2, 2> s = m / -f;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, 2, 2>> es(s);
    if (!(es.eigenvalues()(0) > 0)) return out;
    if (f > 0) conic = -conic;  // the center value is f; make the inside negative

    out.conic = conic;
    out.dual_conic = dual_conic;
    out.center = c;
    out.semi_axes = {Scalar(1) / std::sqrt(es.eigenvalues()(0)), Scalar(1) / std::sqrt(es.eigenvalues()(1))};
    const auto major = es.eigenvectors().col(0);
    out.orientation = std::atan2(major.y(), major.x());
    out.valid = true;
    out.clipped_area = clipped_polygon_area<Scalar>(out.polygon(segments), Scalar(-0.5), Scalar(-0.5),
                                                    Scalar(intrinsics.width) - Scalar(0.5),
                                                    Scalar(intrinsics.height) - Scalar(0.5));
    return out;
}

}  // namespace nbv
