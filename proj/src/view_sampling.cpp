#include "nbv/view_sampling.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>

#include "nbv/error.hpp"

namespace nbv {

namespace {

constexpr double kPi = std::numbers::pi;

double deg(double d) { return d * kPi / 180.0; }

/// Orthonormal (east, north) basis for azimuth measurement around `up`.
std::pair<Vec3, Vec3> tangent_basis(const Vec3& up) {
    const Vec3 seed = std::abs(up.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = (seed - seed.dot(up) * up).normalized();
    return {e1, up.cross(e1)};
}

}  // namespace

const char* to_string(SamplingMode m) { return m == SamplingMode::Hemisphere ? "hemisphere" : "full_sphere"; }

SamplingMode parse_sampling_mode(const std::string& s) {
    if (s == "hemisphere") return SamplingMode::Hemisphere;
    if (s == "full_sphere") return SamplingMode::FullSphere;
    throw ConfigError("unknown sampling mode '" + s + "' (expected hemisphere or full_sphere)");
}

double sampling_radius(const Box3& bbox, double working_distance) {
    if (bbox.isEmpty()) throw GeometryError("sampling radius of an empty bounding box");
    return working_distance + box_diagonal(bbox) / 2;
}

std::vector<double> parallel_polar_angles(SamplingMode mode, int parallels) {
    if (parallels < 1) throw ConfigError("need at least one parallel");
    std::vector<double> out(parallels);
    if (mode == SamplingMode::Hemisphere) {
        const double lo = deg(15), hi = deg(85);
        for (int i = 0; i < parallels; ++i)
            out[i] = parallels == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (parallels - 1);
    } else {
        for (int i = 0; i < parallels; ++i) out[i] = kPi * (i + 1) / (parallels + 1);
    }
    return out;
}

std::vector<int> proportional_counts(const std::vector<double>& weights, int total) {
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<int> counts(weights.size());
    std::vector<double> remainder(weights.size());
    int assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = total * weights[i] / sum;
        counts[i] = static_cast<int>(std::floor(exact));
        remainder[i] = exact - counts[i];
        assigned += counts[i];
    }
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[order[k % order.size()]];
    return counts;
}

CandidateView make_view(const Vec3& center, double radius, double polar, double azimuth, const Vec3& up_axis) {
    const Vec3 up = up_axis.normalized();
    const auto [east, north] = tangent_basis(up);
    const Vec3 dir = std::sin(polar) * (std::cos(azimuth) * east + std::sin(azimuth) * north) + std::cos(polar) * up;
    CandidateView view;
    view.pose = look_at<double>(center + radius * dir, center, up);
    view.radius = radius;
    view.polar = polar;
    double az = std::fmod(azimuth, 2 * kPi);
    if (az < 0) az += 2 * kPi;
    view.azimuth = az;
    return view;
}

std::vector<CandidateView> sample_candidates(const SamplingConfig& config, const Vec3& center, double radius) {
    if (!(radius > 0)) throw GeometryError("sampling radius must be positive");
    if (config.candidates < config.parallels) throw ConfigError("need at least one candidate per parallel");
    const auto polars = parallel_polar_angles(config.mode, config.parallels);
    std::vector<double> circumference;
    for (double p : polars) circumference.push_back(std::sin(p));
    const auto counts = proportional_counts(circumference, config.candidates);

    std::vector<CandidateView> views;
    views.reserve(config.candidates);
    for (std::size_t ring = 0; ring < polars.size(); ++ring) {
        const int n = counts[ring];
        // Odd rings are rotated by half a step.
        const double phase = (ring % 2) * kPi / std::max(n, 1);
        for (int j = 0; j < n; ++j) {
            CandidateView v = make_view(center, radius, polars[ring], phase + 2 * kPi * j / n, config.up);
            v.index = static_cast<int>(views.size());
            views.push_back(v);
        }
    }
    return views;
}

int partition_of(double azimuth, int beta) {
    if (beta < 1) throw ConfigError("partition count must be >= 1");
    double az = std::fmod(azimuth, 2 * kPi);
    if (az < 0) az += 2 * kPi;
    const int p = static_cast<int>(std::floor(az / (2 * kPi / beta)));
    return std::clamp(p, 0, beta - 1);
}

void assign_partitions(std::vector<CandidateView>& views, int beta) {
    for (auto& v : views) v.partition = partition_of(v.azimuth, beta);
}

}  // namespace nbv
