#include "nbv/render.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace nbv {

namespace {

constexpr double kDetEpsilon = 1e-9;
constexpr int kLeafSize = 4;

bool ray_box(const Box3& box, const Vec3& origin, const Vec3& inv_dir, double t_max, double& t_entry) {
    double t0 = 0.0, t1 = t_max;
    for (int a = 0; a < 3; ++a) {
        double ta = (box.min()[a] - origin[a]) * inv_dir[a];
        double tb = (box.max()[a] - origin[a]) * inv_dir[a];
        if (ta > tb) std::swap(ta, tb);
        // NaN from 0 * inf leaves the bound unchanged.
        t0 = ta > t0 ? ta : t0;
        t1 = tb < t1 ? tb : t1;
        if (t0 > t1) return false;
    }
    t_entry = t0;
    return true;
}

}  // namespace

std::size_t DepthFrame::hit_count() const {
    return static_cast<std::size_t>(std::count_if(depths.begin(), depths.end(), [](double d) { return d != kNoHit; }));
}

std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                                         const Vec3& c) {
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 p = dir.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) < kDetEpsilon) return std::nullopt;
    const double inv = 1.0 / det;
    const Vec3 s = origin - a;
    const double u = s.dot(p) * inv;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 q = s.cross(e1);
    const double v = dir.dot(q) * inv;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    const double t = e2.dot(q) * inv;
    if (t <= 0.0) return std::nullopt;
    return t;
}

RayCaster::RayCaster(TriangleMesh mesh) : mesh_(std::move(mesh)) {
    const auto n = static_cast<std::int32_t>(mesh_.triangles.size());
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    std::vector<Vec3> centroids(n);
    for (std::int32_t i = 0; i < n; ++i) {
        const auto& t = mesh_.triangles[i];
        centroids[i] = (mesh_.vertices[t[0]] + mesh_.vertices[t[1]] + mesh_.vertices[t[2]]) / 3.0;
    }
    nodes_.reserve(2 * static_cast<std::size_t>(n) / kLeafSize + 2);
    if (n > 0) build(0, n, centroids);
}

std::int32_t RayCaster::build(std::int32_t begin, std::int32_t end, std::vector<Vec3>& centroids) {
    const auto index = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    Box3 box, centroid_box;
    for (std::int32_t i = begin; i < end; ++i) {
        const auto& t = mesh_.triangles[order_[i]];
        for (int k = 0; k < 3; ++k) box.extend(mesh_.vertices[t[k]]);
        centroid_box.extend(centroids[order_[i]]);
    }
    nodes_[index].box = box;
    if (end - begin <= kLeafSize) {
        nodes_[index].left = begin;
        nodes_[index].count = end - begin;
        return index;
    }
    int axis = 0;
    centroid_box.diagonal().maxCoeff(&axis);
    const std::int32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::int32_t a, std::int32_t b) { return centroids[a][axis] < centroids[b][axis]; });
    const std::int32_t left = build(begin, mid, centroids);
    const std::int32_t right = build(mid, end, centroids);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
}

std::optional<double> RayCaster::cast(const Vec3& origin, const Vec3& dir, double t_max) const {
    if (nodes_.empty()) return std::nullopt;
    const Vec3 inv_dir = dir.cwiseInverse();
    double best = t_max;
    bool hit = false;
    std::int32_t stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        double t_entry = 0.0;
        if (!ray_box(node.box, origin, inv_dir, best, t_entry)) continue;
        if (node.count > 0) {
            for (std::int32_t i = node.left; i < node.left + node.count; ++i) {
                const auto& tri = mesh_.triangles[order_[i]];
                const auto t = intersect_triangle(origin, dir, mesh_.vertices[tri[0]], mesh_.vertices[tri[1]],
                                                  mesh_.vertices[tri[2]]);
                if (t && *t <= best) {
                    best = *t;
                    hit = true;
                }
            }
        } else {
            // Visit the nearer child first.
            double tl = 0.0, tr = 0.0;
            const bool hl = ray_box(nodes_[node.left].box, origin, inv_dir, best, tl);
            const bool hr = ray_box(nodes_[node.right].box, origin, inv_dir, best, tr);
            if (hl && hr) {
                if (tl <= tr) {
                    stack[top++] = node.right;
                    stack[top++] = node.left;
                } else {
                    stack[top++] = node.left;
                    stack[top++] = node.right;
                }
            } else if (hl) {
                stack[top++] = node.left;
            } else if (hr) {
                stack[top++] = node.right;
            }
        }
    }
    if (!hit) return std::nullopt;
    return best;
}

DepthFrame render_depth(const RayCaster& caster, const Posed& pose, const CameraIntrinsics& intrinsics,
                        double noise_sigma, std::uint64_t noise_seed) {
    DepthFrame frame;
    frame.pose = pose;
    frame.intrinsics = intrinsics;
    const int w = intrinsics.width;
    const int h = intrinsics.height;
    frame.depths.assign(static_cast<std::size_t>(w) * h, kNoHit);
    const Vec3 origin = pose.translation;

#pragma omp parallel for schedule(dynamic, 8)
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            const Vec3 dir = (pose.rotation * intrinsics.pixel_ray(u, v)).normalized();
            if (const auto t = caster.cast(origin, dir, intrinsics.max_range))
                frame.depths[static_cast<std::size_t>(v) * w + u] = *t;
        }
    }

    if (noise_sigma > 0.0) {
        std::mt19937_64 rng(noise_seed);
        std::normal_distribution<double> noise(0.0, noise_sigma);
        for (double& d : frame.depths) {
            if (d == kNoHit) continue;
            d = std::clamp(d + noise(rng), 1e-9, intrinsics.max_range);
        }
    }
    return frame;
}

DepthFrame render_depth(const TriangleMesh& mesh, const Posed& pose, const CameraIntrinsics& intrinsics) {
    return render_depth(RayCaster(mesh), pose, intrinsics);
}

std::vector<Vec3> frame_to_points(const DepthFrame& frame) {
    std::vector<Vec3> points;
    const auto& k = frame.intrinsics;
    for (int v = 0; v < k.height; ++v) {
        for (int u = 0; u < k.width; ++u) {
            const double d = frame.at(u, v);
            if (!std::isfinite(d)) continue;
            const Vec3 dir = k.pixel_ray(u, v).normalized();
            points.push_back(frame.pose.to_world(d * dir));
        }
    }
    return points;
}

}  // namespace nbv
