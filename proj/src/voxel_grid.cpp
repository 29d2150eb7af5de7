#include "nbv/voxel_grid.hpp"

#include <cmath>
#include <limits>
#include <unordered_set>

#include "nbv/error.hpp"

namespace nbv {

namespace {

bool unknownish(VoxelState s) { return s == VoxelState::Unknown || s == VoxelState::Frontier; }

struct CellHash {
    std::size_t operator()(const std::array<std::int64_t, 3>& k) const {
        return static_cast<std::size_t>(k[0] * 73856093 ^ k[1] * 19349663 ^ k[2] * 83492791);
    }
};

}  // namespace

bool clip_segment(const Box3& box, const Vec3& start, const Vec3& d, double& t0, double& t1) {
    for (int a = 0; a < 3; ++a) {
        if (d[a] == 0.0) {
            if (start[a] < box.min()[a] || start[a] > box.max()[a]) return false;
            continue;
        }
        double ta = (box.min()[a] - start[a]) / d[a];
        double tb = (box.max()[a] - start[a]) / d[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    return true;
}

const char* to_string(VoxelState s) {
    switch (s) {
        case VoxelState::None: return "none";
        case VoxelState::Empty: return "empty";
        case VoxelState::Occupied: return "occupied";
        case VoxelState::Unknown: return "unknown";
        case VoxelState::Frontier: return "frontier";
    }
    return "?";
}

VoxelGrid::VoxelGrid(const Vec3& origin, double resolution, const Eigen::Vector3i& dims)
    : origin_(origin), resolution_(resolution), dims_(dims) {
    if (!(resolution > 0)) throw ConfigError("voxel resolution must be positive");
    if ((dims.array() <= 0).any()) throw ConfigError("voxel grid dimensions must be positive");
    states_.assign(static_cast<std::size_t>(dims.x()) * dims.y() * dims.z(), VoxelState::None);
}

VoxelGrid VoxelGrid::covering(const Box3& box, double resolution) {
    if (box.isEmpty()) throw ConfigError("cannot build a voxel grid over an empty box");
    const Eigen::Vector3d lo = (box.min() / resolution).array().floor();
    Eigen::Vector3d hi = (box.max() / resolution).array().ceil();
    hi = hi.cwiseMax(lo + Vec3::Ones());
    return VoxelGrid(lo * resolution, resolution, (hi - lo).cast<int>());
}

VoxelIndex VoxelGrid::unravel(std::size_t i) const {
    const auto dx = static_cast<std::size_t>(dims_.x());
    const auto dy = static_cast<std::size_t>(dims_.y());
    return {static_cast<int>(i % dx), static_cast<int>((i / dx) % dy), static_cast<int>(i / (dx * dy))};
}

std::optional<VoxelIndex> VoxelGrid::voxel_of(const Vec3& p) const {
    const Vec3 rel = (p - origin_) / resolution_;
    const VoxelIndex idx = rel.array().floor().cast<int>();
    if (!contains(idx)) return std::nullopt;
    return idx;
}

StateCounts VoxelGrid::counts() const {
    StateCounts c;
    for (VoxelState s : states_) {
        switch (s) {
            case VoxelState::None: ++c.none; break;
            case VoxelState::Empty: ++c.empty; break;
            case VoxelState::Occupied: ++c.occupied; break;
            case VoxelState::Unknown: ++c.unknown; break;
            case VoxelState::Frontier: ++c.frontier; break;
        }
    }
    return c;
}

std::vector<VoxelIndex> VoxelGrid::voxels_in(VoxelState s) const {
    std::vector<VoxelIndex> out;
    for (std::size_t i = 0; i < states_.size(); ++i)
        if (states_[i] == s) out.push_back(unravel(i));
    return out;
}

std::vector<Vec3> VoxelGrid::centers_in(VoxelState s) const {
    std::vector<Vec3> out;
    for (std::size_t i = 0; i < states_.size(); ++i)
        if (states_[i] == s) out.push_back(center(unravel(i)));
    return out;
}

bool VoxelGrid::ensure_contains(const Box3& box) {
    if (box.isEmpty() || span().contains(box)) return false;
    Box3 wanted = span();
    wanted.extend(box);
    VoxelGrid grown = covering(wanted, resolution_);
    const VoxelIndex shift = ((origin_ - grown.origin_) / resolution_).array().round().cast<int>();
    for (std::size_t i = 0; i < states_.size(); ++i) {
        if (states_[i] == VoxelState::None) continue;
        grown.states_[grown.linear(unravel(i) + shift)] = states_[i];
    }
    grown.bbox_ = bbox_;
    *this = std::move(grown);
    return true;
}

std::vector<VoxelIndex> traverse_ray(const VoxelGrid& grid, const Vec3& start, const Vec3& end) {
    std::vector<VoxelIndex> out;
    visit_ray(grid, start, end, [&](const VoxelIndex& idx) {
        out.push_back(idx);
        return true;
    });
    return out;
}

TransitionCounts integrate_observation(VoxelGrid& grid, const Observation& obs) {
    TransitionCounts counts;
    auto set = [&](const VoxelIndex& idx, VoxelState s) {
        const VoxelState old = grid.state(idx);
        if (old == s) return;
        grid.set_state(idx, s);
        if (s == VoxelState::Empty) ++counts.to_empty;
        if (s == VoxelState::Occupied) ++counts.to_occupied;
        if (s == VoxelState::Unknown) ++counts.to_unknown;
    };

    // Point evidence first, so every ray sees the full occupied set of this frame.
    for (const Vec3& p : obs.points)
        if (auto idx = grid.voxel_of(p)) set(*idx, VoxelState::Occupied);

    const Box3& bbox = grid.bbox();
    for (const Vec3& p : obs.points) {
        bool blocked = false;
        for (const VoxelIndex& idx : traverse_ray(grid, obs.sensor_origin, p)) {
            const VoxelState s = grid.state(idx);
            if (s == VoxelState::Occupied) {
                blocked = true;
            } else if (!blocked) {
                if (s == VoxelState::None || unknownish(s)) set(idx, VoxelState::Empty);
            } else if (s == VoxelState::None) {
                set(idx, VoxelState::Unknown);
            }
        }
        if (bbox.isEmpty()) continue;
        // Occluded space behind the hit, limited to B.
        const Vec3 dir = p - obs.sensor_origin;
        if (dir.squaredNorm() == 0.0) continue;
        double t0 = 1.0, t1 = std::numeric_limits<double>::infinity();
        if (!clip_segment(bbox, obs.sensor_origin, dir, t0, t1) || !(t1 > 1.0)) continue;
        for (const VoxelIndex& idx : traverse_ray(grid, p, obs.sensor_origin + t1 * dir))
            if (grid.state(idx) == VoxelState::None) set(idx, VoxelState::Unknown);
    }
    return counts;
}

bool is_frontier_candidate(const VoxelGrid& grid, const VoxelIndex& idx) {
    bool empty = false, occupied = false;
    for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0 && dz == 0) continue;
                const VoxelIndex n = idx + VoxelIndex(dx, dy, dz);
                if (!grid.contains(n)) continue;
                const VoxelState s = grid.state(n);
                empty |= s == VoxelState::Empty;
                occupied |= s == VoxelState::Occupied;
            }
    return empty && occupied;
}

std::vector<VoxelIndex> update_frontier(VoxelGrid& grid) {
    std::vector<VoxelIndex> frontier;
    std::vector<std::pair<std::size_t, VoxelState>> changes;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const VoxelState s = grid.state(i);
        if (!unknownish(s)) continue;
        const VoxelIndex idx = grid.unravel(i);
        const VoxelState next = is_frontier_candidate(grid, idx) ? VoxelState::Frontier : VoxelState::Unknown;
        if (next == VoxelState::Frontier) frontier.push_back(idx);
        if (next != s) changes.emplace_back(i, next);
    }
    // The predicate reads only Empty/Occupied, so in-place order would not
    // matter; deferring keeps the pass obviously order-free.
    for (const auto& [i, s] : changes) grid.set_state(grid.unravel(i), s);
    return frontier;
}

Box3 update_bbox(VoxelGrid& grid, const Vec3& view_direction, bool first_frame, double gamma) {
    Box3 occupied;
    Box3 box;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const VoxelState s = grid.state(i);
        const VoxelIndex idx = grid.unravel(i);
        if (s == VoxelState::Occupied) {
            occupied.extend(grid.cell(idx));
        } else if (!first_frame && s == VoxelState::Unknown) {
            box.extend(grid.cell(idx));
        } else if (!first_frame && s == VoxelState::Frontier) {
            const Vec3 c = grid.center(idx);
            box.extend(Box3(c - Vec3::Constant(gamma), c + Vec3::Constant(gamma)));
        }
    }
    if (occupied.isEmpty()) throw EmptyInputError("no occupied voxels: the observation saw nothing");

    if (first_frame) {
        const Vec3 extent = occupied.diagonal();
        const Vec3 v = view_direction.normalized();
        const Vec3 abs_v = v.cwiseAbs();
        // Smallest s >= 0 with |extent + s|v|| = 2 |extent|.
        const double b = extent.dot(abs_v);
        const double s = -b + std::sqrt(b * b + 3.0 * extent.squaredNorm());
        box = occupied;
        for (int a = 0; a < 3; ++a) {
            if (v[a] > 0) box.max()[a] += s * abs_v[a];
            if (v[a] < 0) box.min()[a] -= s * abs_v[a];
        }
    } else {
        box.extend(occupied);
    }
    grid.set_bbox(box);
    return box;
}

std::vector<Vec3> preprocess_points(std::span<const Vec3> points, const Box3& workspace, double spacing) {
    std::vector<Vec3> out;
    std::unordered_set<std::array<std::int64_t, 3>, CellHash> seen;
    for (const Vec3& p : points) {
        if (!workspace.contains(p)) continue;
        const std::array<std::int64_t, 3> key{static_cast<std::int64_t>(std::floor(p.x() / spacing)),
                                              static_cast<std::int64_t>(std::floor(p.y() / spacing)),
                                              static_cast<std::int64_t>(std::floor(p.z() / spacing))};
        if (seen.insert(key).second) out.push_back(p);
    }
    return out;
}

}  // namespace nbv
