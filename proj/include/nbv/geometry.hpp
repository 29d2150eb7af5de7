#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "nbv/error.hpp"

namespace nbv {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Box3 = Eigen::AlignedBox3d;

/// Rigid camera-to-world transform. Camera frame is x right, y down, z forward.
template <typename Scalar>
struct Pose {
    using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
    using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

    Matrix3 rotation = Matrix3::Identity();
    Vector3 translation = Vector3::Zero();

    Vector3 position() const { return translation; }
    Vector3 optical_axis() const { return rotation.col(2); }

    Vector3 to_world(const Vector3& p_cam) const { return rotation * p_cam + translation; }
    Vector3 to_camera(const Vector3& p_world) const {
        return rotation.transpose() * (p_world - translation);
    }

    /// 3x4 world-to-camera extrinsic block [R^T | -R^T t].
    Eigen::Matrix<Scalar, 3, 4> world_to_camera() const {
        Eigen::Matrix<Scalar, 3, 4> m;
        m.template leftCols<3>() = rotation.transpose();
        m.col(3) = -rotation.transpose() * translation;
        return m;
    }

    bool is_valid(Scalar tol = Scalar(1e-9)) const {
        return (rotation.transpose() * rotation - Matrix3::Identity()).cwiseAbs().maxCoeff() <= tol &&
               std::abs(rotation.determinant() - Scalar(1)) <= tol;
    }
};

using Posed = Pose<double>;

/// Pose at `eye` whose optical axis points at `target`. The image-up direction
/// (-y) follows the projection of `up`; falls back to world x when looking
/// along `up`.
template <typename Scalar>
Pose<Scalar> look_at(const Eigen::Matrix<Scalar, 3, 1>& eye, const Eigen::Matrix<Scalar, 3, 1>& target,
                     const Eigen::Matrix<Scalar, 3, 1>& up) {
    using V = Eigen::Matrix<Scalar, 3, 1>;
    const V z = (target - eye).normalized();
    V image_up = up - up.dot(z) * z;
    if (image_up.norm() < Scalar(1e-9)) {
        const V fallback = V::UnitX();
        image_up = fallback - fallback.dot(z) * z;
    }
    const V y = -image_up.normalized();
    const V x = y.cross(z);
    Pose<Scalar> pose;
    pose.rotation.col(0) = x;
    pose.rotation.col(1) = y;
    pose.rotation.col(2) = z;
    pose.translation = eye;
    return pose;
}

/// Pinhole intrinsics. Pixel (u, v) has its center at integer coordinates, so
/// the image rectangle spans [-0.5, width - 0.5] x [-0.5, height - 0.5].
struct CameraIntrinsics {
    double fx = 615.0;
    double fy = 615.0;
    double cx = 319.5;
    double cy = 239.5;
    int width = 640;
    int height = 480;
    double working_distance = 0.4;
    double max_range = 3.0;

    Mat3 K() const {
        Mat3 k;
        k << fx, 0, cx, 0, fy, cy, 0, 0, 1;
        return k;
    }

    bool is_valid() const {
        return fx > 0 && fy > 0 && width > 0 && height > 0 && cx >= 0 && cx < width && cy >= 0 &&
               cy < height && max_range > 0;
    }

    /// Unnormalized camera-frame ray direction (z = 1) through pixel (u, v).
    Vec3 pixel_ray(double u, double v) const { return {(u - cx) / fx, (v - cy) / fy, 1.0}; }
};

inline double box_diagonal(const Box3& box) { return box.isEmpty() ? 0.0 : box.diagonal().norm(); }

}  // namespace nbv
