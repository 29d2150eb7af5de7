#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nbv/ellipsoid.hpp"
#include "nbv/error.hpp"

namespace nbv {

template <typename Scalar>
struct MveeOptions {
    Scalar tolerance = Scalar(1e-3);
    /// Half-width of the +-axis offsets added around every point of a
    /// degenerate (rank < 3) set.
    Scalar inflation = Scalar(0.015);
    int max_iterations = 1000;
};

template <typename Scalar>
struct MveeResult {
    Ellipsoid<Scalar> ellipsoid;
    int iterations = 0;
    bool inflated = false;
    /// Largest form value before the final rescale to exact containment.
    Scalar max_form = 0;
};

/// True when the points do not span 3D (coplanar, collinear, or a single point).
template <typename Scalar>
bool is_affinely_degenerate(std::span<const Eigen::Matrix<Scalar, 3, 1>> points) {
    using V = Eigen::Matrix<Scalar, 3, 1>;
    if (points.size() < 4) return true;
    V mean = V::Zero();
    for (const V& p : points) mean += p;
    mean /= Scalar(points.size());
    Eigen::Matrix<Scalar, 3, 3> scatter = Eigen::Matrix<Scalar, 3, 3>::Zero();
    for (const V& p : points) scatter += (p - mean) * (p - mean).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, 3, 3>> es(scatter, Eigen::EigenvaluesOnly);
    const Scalar hi = es.eigenvalues()(2);
    return !(hi > 0) || es.eigenvalues()(0) <= Scalar(1e-10) * hi;
}

/// Minimum-volume enclosing ellipsoid by Khachiyan iterations with
/// Wolfe-Atwood away steps on the lifted points (x, 1). Iterates until
/// every point has form value <= 1 + tolerance, then rescales the shape so
/// every point has form value <= 1.
template <typename Scalar>
MveeResult<Scalar> fit_mvee(std::span<const Eigen::Matrix<Scalar, 3, 1>> input, const MveeOptions<Scalar>& options = {}) {
    using V = Eigen::Matrix<Scalar, 3, 1>;
    using M3 = Eigen::Matrix<Scalar, 3, 3>;
    using M4 = Eigen::Matrix<Scalar, 4, 4>;
    if (input.empty()) throw EmptyInputError("MVEE of an empty point set");
    if (!(options.tolerance > 0)) throw GeometryError("MVEE tolerance must be positive");

    MveeResult<Scalar> result;
    std::vector<V> points(input.begin(), input.end());
    if (is_affinely_degenerate<Scalar>(input)) {
        if (!(options.inflation > 0)) throw GeometryError("degenerate point set and no inflation radius");
        result.inflated = true;
        for (const V& p : input)
            for (int a = 0; a < 3; ++a)
                for (Scalar s : {Scalar(-1), Scalar(1)}) {
                    V q = p;
                    q[a] += s * options.inflation;
                    points.push_back(q);
                }
    }

    const auto n = static_cast<Eigen::Index>(points.size());
    constexpr Scalar d = 3;
    Eigen::Matrix<Scalar, 4, Eigen::Dynamic> lifted(4, n);
    Eigen::Matrix<Scalar, 3, Eigen::Dynamic> raw(3, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        raw.col(i) = points[i];
        lifted.col(i) << points[i], Scalar(1);
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> u = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Constant(n, Scalar(1) / n);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> m(n);

    auto lifted_forms = [&] {
        const M4 x = lifted * u.asDiagonal() * lifted.transpose();
        const Eigen::LDLT<M4> ldlt(x);
        const auto solved = ldlt.solve(lifted);
        m = (lifted.array() * solved.array()).colwise().sum().transpose();
    };

    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        lifted_forms();
        Eigen::Index j = 0;
        const Scalar m_max = m.maxCoeff(&j);
        // Form value of point i w.r.t. the current ellipsoid is (m_i - 1) / d.
        if ((m_max - Scalar(1)) / d <= Scalar(1) + options.tolerance) break;

        Eigen::Index k = -1;
        Scalar m_min = std::numeric_limits<Scalar>::infinity();
        for (Eigen::Index i = 0; i < n; ++i)
            if (u(i) > 0 && m(i) < m_min) {
                m_min = m(i);
                k = i;
            }

        if (m_max - (d + 1) >= (d + 1) - m_min || k < 0) {
            const Scalar step = (m_max - d - 1) / ((d + 1) * (m_max - 1));
            u *= (Scalar(1) - step);
            u(j) += step;
        } else {
            // A point at the current center has m == 1; dropping its weight is then the only bounded move.
            const Scalar drop = u(k) / (Scalar(1) - u(k));
            const Scalar step = m_min - Scalar(1) > std::numeric_limits<Scalar>::epsilon()
                                    ? std::min((d + 1 - m_min) / ((d + 1) * (m_min - 1)), drop)
                                    : drop;
            u *= (Scalar(1) + step);
            u(k) -= step;
            u(k) = std::max(u(k), Scalar(0));
        }
    }
    result.iterations = iter;

    const V c = raw * u;
    const M3 cov = raw * u.asDiagonal() * raw.transpose() - c * c.transpose();
    M3 shape = cov.inverse() / d;
    shape = Scalar(0.5) * (shape + shape.transpose());

    Scalar worst = 0;
    for (Eigen::Index i = 0; i < n; ++i) worst = std::max(worst, (raw.col(i) - c).dot(shape * (raw.col(i) - c)));
    result.max_form = worst;
    if (worst > 0) shape /= worst;

    result.ellipsoid.center = c;
    result.ellipsoid.shape = shape;
    result.ellipsoid.member_count = static_cast<int>(input.size());
    return result;
}

}  // namespace nbv
