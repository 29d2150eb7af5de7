#include "nbv/coverage.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <unordered_map>

#include "nbv/error.hpp"

namespace nbv {

namespace {

using Key = std::array<std::int64_t, 3>;

struct KeyHash {
    std::size_t operator()(const Key& k) const {
        return static_cast<std::size_t>(k[0] * 73856093 ^ k[1] * 19349663 ^ k[2] * 83492791);
    }
};

Key key_of(const Vec3& p, double cell) {
    return {static_cast<std::int64_t>(std::floor(p.x() / cell)), static_cast<std::int64_t>(std::floor(p.y() / cell)),
            static_cast<std::int64_t>(std::floor(p.z() / cell))};
}

}  // namespace

std::vector<Vec3> sample_surface(const TriangleMesh& mesh, std::size_t count, std::uint64_t seed) {
    if (mesh.empty()) throw EmptyInputError("cannot sample an empty mesh");
    std::vector<double> cumulative(mesh.triangles.size());
    double total = 0;
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) cumulative[i] = total += mesh.triangle_area(i);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<Vec3> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        const double r = u01(rng) * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
        const auto& t = mesh.triangles[std::min<std::size_t>(it - cumulative.begin(), mesh.triangles.size() - 1)];
        double a = u01(rng), b = u01(rng);
        if (a + b > 1) {
            a = 1 - a;
            b = 1 - b;
        }
        const Vec3& p0 = mesh.vertices[t[0]];
        out.push_back(p0 + a * (mesh.vertices[t[1]] - p0) + b * (mesh.vertices[t[2]] - p0));
    }
    return out;
}

double coverage(std::span<const Vec3> model, std::span<const Vec3> acquired, double threshold) {
    if (!(threshold > 0)) throw ConfigError("coverage threshold must be positive");
    if (model.empty() || acquired.empty()) return 0.0;
    std::unordered_map<Key, std::vector<Vec3>, KeyHash> buckets;
    for (const Vec3& p : acquired) buckets[key_of(p, threshold)].push_back(p);
    const double t2 = threshold * threshold;
    std::size_t covered = 0;
    for (const Vec3& m : model) {
        const Key k = key_of(m, threshold);
        bool hit = false;
        for (int dx = -1; dx <= 1 && !hit; ++dx)
            for (int dy = -1; dy <= 1 && !hit; ++dy)
                for (int dz = -1; dz <= 1 && !hit; ++dz) {
                    const auto it = buckets.find({k[0] + dx, k[1] + dy, k[2] + dz});
                    if (it == buckets.end()) continue;
                    for (const Vec3& p : it->second)
                        if ((p - m).squaredNorm() <= t2) {
                            hit = true;
                            break;
                        }
                }
        covered += hit;
    }
    return double(covered) / double(model.size());
}

}  // namespace nbv
