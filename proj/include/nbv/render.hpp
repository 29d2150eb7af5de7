#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "nbv/geometry.hpp"
#include "nbv/mesh.hpp"

namespace nbv {

/// In-memory marker for pixels without a hit.
inline constexpr double kNoHit = std::numeric_limits<double>::infinity();

struct DepthFrame {
    /// Row-major, `intrinsics.width * intrinsics.height` ranges (meters along
    /// the pixel ray) or kNoHit.
    std::vector<double> depths;
    Posed pose;
    CameraIntrinsics intrinsics;

    double at(int u, int v) const { return depths[static_cast<std::size_t>(v) * intrinsics.width + u]; }
    double& at(int u, int v) { return depths[static_cast<std::size_t>(v) * intrinsics.width + u]; }
    std::size_t hit_count() const;
};

/// Parametric ray/triangle test (Moller-Trumbore). Returns the ray parameter t
/// of a hit with t > 0; |det| below 1e-9 counts as parallel.
std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                                         const Vec3& c);

/// Immutable bounding-volume hierarchy over a mesh. Queries are const and may
/// run concurrently.
class RayCaster {
public:
    explicit RayCaster(TriangleMesh mesh);

    const TriangleMesh& mesh() const { return mesh_; }

    /// Nearest hit parameter along `origin + t * dir` with 0 < t <= t_max.
    std::optional<double> cast(const Vec3& origin, const Vec3& dir, double t_max) const;

private:
    struct Node {
        Box3 box;
        std::int32_t left = -1;   // child node index, or first slot in order_ for leaves
        std::int32_t right = -1;
        std::int32_t count = 0;   // >0 marks a leaf
    };

    std::int32_t build(std::int32_t begin, std::int32_t end, std::vector<Vec3>& centroids);

    TriangleMesh mesh_;
    std::vector<std::int32_t> order_;
    std::vector<Node> nodes_;
};

/// Renders a range image from `pose`. With `noise_sigma > 0`, zero-mean
/// Gaussian noise seeded by `noise_seed` is added to every hit.
DepthFrame render_depth(const RayCaster& caster, const Posed& pose, const CameraIntrinsics& intrinsics,
                        double noise_sigma = 0.0, std::uint64_t noise_seed = 0);
DepthFrame render_depth(const TriangleMesh& mesh, const Posed& pose, const CameraIntrinsics& intrinsics);

/// World-space point per finite pixel, in row-major pixel order.
std::vector<Vec3> frame_to_points(const DepthFrame& frame);

}  // namespace nbv
