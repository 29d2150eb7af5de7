#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nbv/error.hpp"
#include "nbv/parallel.hpp"

namespace nbv {

template <typename Scalar>
struct GaussianComponent {
    Scalar weight{};
    Eigen::Matrix<Scalar, 3, 1> mean = Eigen::Matrix<Scalar, 3, 1>::Zero();
    Eigen::Matrix<Scalar, 3, 3> covariance = Eigen::Matrix<Scalar, 3, 3>::Identity();
};

template <typename Scalar>
struct GmmModel {
    std::vector<GaussianComponent<Scalar>> components;
    Scalar log_likelihood = -std::numeric_limits<Scalar>::infinity();
    /// ln L before every M-step, then the final value.
    std::vector<Scalar> log_likelihood_trace;
    int iterations = 0;

    int size() const { return static_cast<int>(components.size()); }
};

struct ClusterAssignment {
    std::vector<int> labels;
    std::vector<std::vector<int>> clusters;  // point indices per component
};

template <typename Scalar>
struct GmmOptions {
    /// Lower bound on every covariance eigenvalue (m^2).
    Scalar covariance_floor = Scalar(1e-6);
    Scalar tolerance = Scalar(1e-6);
    int max_iterations = 200;
};

template <typename Scalar>
struct GmmFit {
    GmmModel<Scalar> model;
    ClusterAssignment assignment;
    /// Row i holds point i's responsibilities.
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> responsibilities;
};

/// Free parameters of a full-covariance 3D mixture: 3 mean + 6 covariance + 1
/// weight per component, less one for the weight sum constraint.
inline int gmm_parameter_count(int components) { return 10 * components - 1; }

template <typename Scalar>
Scalar bic_value(int parameters, std::size_t samples, Scalar log_likelihood) {
    return Scalar(parameters) * std::log(Scalar(samples)) - Scalar(2) * log_likelihood;
}

template <typename Scalar>
Scalar bic(const GmmModel<Scalar>& model, std::size_t samples) {
    return bic_value(gmm_parameter_count(model.size()), samples, model.log_likelihood);
}

namespace detail {

template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3T = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Maximizes the Gaussian likelihood of `scatter` subject to eigenvalues >= floor.
template <typename Scalar>
Mat3T<Scalar> floor_covariance(const Mat3T<Scalar>& scatter, Scalar floor) {
    Eigen::SelfAdjointEigenSolver<Mat3T<Scalar>> es(scatter);
    const Vec3T<Scalar> clipped = es.eigenvalues().cwiseMax(floor);
    Mat3T<Scalar> cov = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
    return Scalar(0.5) * (cov + cov.transpose());
}

template <typename Scalar>
using Mat3X = Eigen::Matrix<Scalar, 3, Eigen::Dynamic>;

/// Responsibilities (T x n, column per point) of the mixture; returns the
/// total log-likelihood.
template <typename Scalar>
Scalar e_step(const Mat3X<Scalar>& points, const std::vector<GaussianComponent<Scalar>>& comps, MatX<Scalar>& resp) {
    const Eigen::Index n = points.cols();
    const auto t = static_cast<Eigen::Index>(comps.size());
    resp.resize(t, n);
    const Scalar log_2pi = std::log(Scalar(2) * Scalar(3.14159265358979323846));
    Mat3X<Scalar> z;
    for (Eigen::Index k = 0; k < t; ++k) {
        const Eigen::LLT<Mat3T<Scalar>> llt(comps[k].covariance);
        const Mat3T<Scalar> L = llt.matrixL();
        const Scalar log_det = Scalar(2) * L.diagonal().array().log().sum();
        const Scalar base = std::log(comps[k].weight) - Scalar(0.5) * (Scalar(3) * log_2pi + log_det);
        const Mat3T<Scalar> whiten = L.template triangularView<Eigen::Lower>().solve(Mat3T<Scalar>::Identity());
        z.noalias() = whiten.lazyProduct(points.colwise() - comps[k].mean);
        resp.row(k) = base - Scalar(0.5) * z.colwise().squaredNorm().array();
    }
    const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> m = resp.colwise().maxCoeff();
    resp = (resp.rowwise() - m).array().exp().matrix();
    const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> sum = resp.colwise().sum();
    resp.array().rowwise() /= sum.array();
    return m.sum() + sum.array().log().sum();
}

}  // namespace detail

/// EM fit of a T-component full-covariance mixture. Means are seeded by
/// farthest-point sampling from a seed-chosen first point; covariances start
/// at the sample covariance / T and weights uniform. Covariance updates clip
/// eigenvalues at `options.covariance_floor`, which keeps every step a
/// constrained likelihood maximization (ln L never decreases).
template <typename Scalar>
GmmFit<Scalar> fit_gmm(std::span<const Eigen::Matrix<Scalar, 3, 1>> points, int components, std::uint64_t seed,
                       const GmmOptions<Scalar>& options = {}) {
    using V = detail::Vec3T<Scalar>;
    using M = detail::Mat3T<Scalar>;
    const std::size_t n = points.size();
    if (components < 1) throw InfeasibleModelError("mixture needs at least one component");
    if (n < static_cast<std::size_t>(components))
        throw InfeasibleModelError("fewer points (" + std::to_string(n) + ") than components (" +
                                   std::to_string(components) + ")");

    V mean = V::Zero();
    for (const V& p : points) mean += p;
    mean /= Scalar(n);
    M scatter = M::Zero();
    for (const V& p : points) scatter += (p - mean) * (p - mean).transpose();
    scatter /= Scalar(n);

    // Farthest-point seeding.
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> seeds{std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)};
    std::vector<Scalar> dist(n, std::numeric_limits<Scalar>::infinity());
    while (seeds.size() < static_cast<std::size_t>(components)) {
        const V& last = points[seeds.back()];
        std::size_t best = 0;
        for (std::size_t i = 0; i < n; ++i) {
            dist[i] = std::min(dist[i], (points[i] - last).squaredNorm());
            if (dist[i] > dist[best]) best = i;
        }
        seeds.push_back(best);
    }

    GmmFit<Scalar> fit;
    auto& comps = fit.model.components;
    comps.resize(components);
    const M init_cov = detail::floor_covariance<Scalar>(scatter / Scalar(components), options.covariance_floor);
    for (int k = 0; k < components; ++k) {
        comps[k].weight = Scalar(1) / Scalar(components);
        comps[k].mean = points[seeds[k]];
        comps[k].covariance = init_cov;
    }

    detail::Mat3X<Scalar> pts(3, static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) pts.col(static_cast<Eigen::Index>(i)) = points[i];
    detail::MatX<Scalar> resp;  // T x n
    Scalar ll = detail::e_step<Scalar>(pts, comps, resp);
    fit.model.log_likelihood_trace.push_back(ll);

    detail::Mat3X<Scalar> d;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        for (int k = 0; k < components; ++k) {
            const Scalar nk = resp.row(k).sum();
            if (!(nk > Scalar(1e-10))) continue;  // starved component keeps its parameters
            const V mu = pts.lazyProduct(resp.row(k).transpose()) / nk;
            d = pts.colwise() - mu;
            const M s = (d.array().rowwise() * resp.row(k).array()).matrix().lazyProduct(d.transpose());
            comps[k].mean = mu;
            comps[k].covariance = detail::floor_covariance<Scalar>(s / nk, options.covariance_floor);
            comps[k].weight = nk / Scalar(n);
        }
        Scalar wsum = 0;
        for (auto& c : comps) wsum += c.weight;
        for (auto& c : comps) c.weight /= wsum;

        const Scalar next = detail::e_step<Scalar>(pts, comps, resp);
        fit.model.log_likelihood_trace.push_back(next);
        fit.model.iterations = iter + 1;
        const Scalar delta = next - ll;
        ll = next;
        if (std::abs(delta) < options.tolerance) break;
    }
    fit.model.log_likelihood = ll;
    fit.responsibilities = resp.transpose();

    auto& asg = fit.assignment;
    asg.labels.resize(n);
    asg.clusters.assign(components, {});
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::Index best = 0;
        resp.col(static_cast<Eigen::Index>(i)).maxCoeff(&best);
        asg.labels[i] = static_cast<int>(best);
        asg.clusters[best].push_back(static_cast<int>(i));
    }
    return fit;
}

template <typename Scalar>
struct ComponentSelection {
    int components = 0;
    GmmFit<Scalar> fit;
    std::vector<Scalar> bic_by_components;  // index T-1
};

/// Fits T = 1..min(max_components, |points|) and keeps the lowest BIC; ties go
/// to the smaller T.
template <typename Scalar>
ComponentSelection<Scalar> select_components(std::span<const Eigen::Matrix<Scalar, 3, 1>> points, int max_components,
                                             std::uint64_t seed, const GmmOptions<Scalar>& options = {}) {
    if (points.empty()) throw EmptyInputError("cannot cluster an empty point set");
    const int top = std::min<int>(std::max(max_components, 1), static_cast<int>(points.size()));
    std::vector<GmmFit<Scalar>> fits(top);
    std::vector<Scalar> scores(top);
    ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 1)
    for (int t = 1; t <= top; ++t)
        slot.run([&] {
            fits[t - 1] = fit_gmm<Scalar>(points, t, seed, options);
            scores[t - 1] = bic(fits[t - 1].model, points.size());
        });
    slot.rethrow();
    int best = 0;
    for (int t = 1; t < top; ++t)
        if (scores[t] < scores[best]) best = t;
    ComponentSelection<Scalar> out;
    out.components = best + 1;
    out.fit = std::move(fits[best]);
    out.bic_by_components = std::move(scores);
    return out;
}

}  // namespace nbv
