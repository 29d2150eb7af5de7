#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nbv/geometry.hpp"

namespace nbv {

enum class VoxelState : std::uint8_t { None = 0, Empty = 1, Occupied = 2, Unknown = 3, Frontier = 4 };

const char* to_string(VoxelState s);

using VoxelIndex = Eigen::Vector3i;

struct StateCounts {
    std::size_t none = 0, empty = 0, occupied = 0, unknown = 0, frontier = 0;

    std::size_t active() const { return occupied + unknown + frontier; }
    bool operator==(const StateCounts&) const = default;
};

/// Dense axis-aligned voxel map with the adaptive object bounding box B.
/// Voxel (i, j, k) spans [origin + res * (i, j, k), origin + res * (i + 1, j + 1, k + 1)).
/// Voxel faces lie on the global lattice res * Z^3, so reallocation never
/// shifts voxel boundaries.
class VoxelGrid {
public:
    VoxelGrid() = default;
    VoxelGrid(const Vec3& origin, double resolution, const Eigen::Vector3i& dims);

    /// Smallest lattice-aligned grid whose span contains `box`.
    static VoxelGrid covering(const Box3& box, double resolution);

    const Vec3& origin() const { return origin_; }
    double resolution() const { return resolution_; }
    const Eigen::Vector3i& dims() const { return dims_; }
    std::size_t size() const { return states_.size(); }
    Box3 span() const { return {origin_, origin_ + resolution_ * dims_.cast<double>()}; }

    bool contains(const VoxelIndex& idx) const {
        return (idx.array() >= 0).all() && (idx.array() < dims_.array()).all();
    }
    std::size_t linear(const VoxelIndex& idx) const {
        return static_cast<std::size_t>(idx.x()) +
               static_cast<std::size_t>(dims_.x()) *
                   (static_cast<std::size_t>(idx.y()) + static_cast<std::size_t>(dims_.y()) * idx.z());
    }
    VoxelIndex unravel(std::size_t i) const;
    std::optional<VoxelIndex> voxel_of(const Vec3& p) const;
    Vec3 center(const VoxelIndex& idx) const {
        return origin_ + resolution_ * (idx.cast<double>() + Vec3::Constant(0.5));
    }
    Box3 cell(const VoxelIndex& idx) const {
        const Vec3 lo = origin_ + resolution_ * idx.cast<double>();
        return {lo, lo + Vec3::Constant(resolution_)};
    }

    VoxelState state(const VoxelIndex& idx) const { return states_[linear(idx)]; }
    VoxelState state(std::size_t i) const { return states_[i]; }
    void set_state(const VoxelIndex& idx, VoxelState s) { states_[linear(idx)] = s; }
    std::span<const VoxelState> states() const { return states_; }

    const Box3& bbox() const { return bbox_; }
    void set_bbox(const Box3& b) { bbox_ = b; }

    StateCounts counts() const;
    std::vector<VoxelIndex> voxels_in(VoxelState s) const;
    std::vector<Vec3> centers_in(VoxelState s) const;

    /// Grows the grid (copying states) until its span contains `box`.
    /// Returns true when a reallocation happened.
    bool ensure_contains(const Box3& box);

private:
    Vec3 origin_ = Vec3::Zero();
    double resolution_ = 1.0;
    Eigen::Vector3i dims_ = Eigen::Vector3i::Zero();
    std::vector<VoxelState> states_;
    Box3 bbox_;
};

/// Clips p(t) = start + t * d, t in [t0, t1], to `box`; false when disjoint.
bool clip_segment(const Box3& box, const Vec3& start, const Vec3& d, double& t0, double& t1);

/// Calls `visit(idx)` for every voxel pierced by the segment start -> end, in
/// order of entry distance, clipped to the grid (Amanatides-Woo traversal).
/// Stops early when `visit` returns false.
template <typename Visitor>
void visit_ray(const VoxelGrid& grid, const Vec3& start, const Vec3& end, Visitor&& visit) {
    if (grid.size() == 0) return;
    const Vec3 d = end - start;
    const double res = grid.resolution();
    if (d.squaredNorm() == 0.0) {
        if (auto idx = grid.voxel_of(start)) visit(*idx);
        return;
    }
    double t0 = 0.0, t1 = 1.0;
    if (!clip_segment(grid.span(), start, d, t0, t1)) return;

    const Vec3 rel = (start + t0 * d - grid.origin()) / res;
    VoxelIndex idx;
    Eigen::Vector3i step;
    Vec3 t_max, t_delta;
    for (int a = 0; a < 3; ++a) {
        double cell = std::floor(rel[a]);
        // On a face while moving negative: the pierced cell is the lower one.
        if (d[a] < 0 && cell == rel[a]) cell -= 1.0;
        idx[a] = std::clamp(static_cast<int>(cell), 0, grid.dims()[a] - 1);
        if (d[a] > 0) {
            step[a] = 1;
            t_delta[a] = res / d[a];
            t_max[a] = (grid.origin()[a] + (idx[a] + 1) * res - start[a]) / d[a];
        } else if (d[a] < 0) {
            step[a] = -1;
            t_delta[a] = -res / d[a];
            t_max[a] = (grid.origin()[a] + idx[a] * res - start[a]) / d[a];
        } else {
            step[a] = 0;
            t_delta[a] = std::numeric_limits<double>::infinity();
            t_max[a] = std::numeric_limits<double>::infinity();
        }
    }
    for (;;) {
        if (!visit(static_cast<const VoxelIndex&>(idx))) return;
        int axis = 0;
        t_max.minCoeff(&axis);
        if (!(t_max[axis] < t1)) return;
        idx[axis] += step[axis];
        if (idx[axis] < 0 || idx[axis] >= grid.dims()[axis]) return;
        t_max[axis] += t_delta[axis];
    }
}

/// Voxels pierced by the segment start -> end, ordered by entry distance,
/// clipped to the grid.
std::vector<VoxelIndex> traverse_ray(const VoxelGrid& grid, const Vec3& start, const Vec3& end);

struct Observation {
    std::vector<Vec3> points;
    Vec3 sensor_origin = Vec3::Zero();
};

/// Number of voxels that entered each state during one update.
struct TransitionCounts {
    std::size_t to_empty = 0, to_occupied = 0, to_unknown = 0;
};

/// Applies the occupied / free-space / occlusion rules for one observation.
/// Unknown voxels are created behind surfaces only inside the current bbox.
TransitionCounts integrate_observation(VoxelGrid& grid, const Observation& obs);

/// Reclassifies Unknown/Frontier voxels: Frontier iff the 26-neighbourhood
/// holds at least one Empty and one Occupied voxel.
std::vector<VoxelIndex> update_frontier(VoxelGrid& grid);

/// Frontier predicate for a single voxel (Unknown or Frontier state required).
bool is_frontier_candidate(const VoxelGrid& grid, const VoxelIndex& idx);

/// Recomputes the bounding box B and stores it on the grid. First frame: the
/// box of the occupied cells stretched along `view_direction` until its
/// diagonal doubles. Later frames: box of occupied and unknown cells plus
/// spheres of radius `gamma` around frontier centers. Throws EmptyInputError
/// when nothing is occupied.
Box3 update_bbox(VoxelGrid& grid, const Vec3& view_direction, bool first_frame, double gamma);

/// Crops to `workspace` and keeps the first point of every cell of size
/// `spacing` (insertion order preserved, so the result is deterministic).
std::vector<Vec3> preprocess_points(std::span<const Vec3> points, const Box3& workspace, double spacing);

}  // namespace nbv
