#include "nbv/oracle.hpp"
#include "nbv/parallel.hpp"

#include <algorithm>
#include <numeric>

namespace nbv {

namespace {

OracleScore evaluate_with(const CandidateView& view, const VoxelGrid& grid, const CameraIntrinsics& k, int stride,
                          std::vector<std::uint8_t>& seen) {
    OracleScore score;
    seen.assign(grid.size(), 0);
    const Vec3 origin = view.pose.translation;
    for (int v = 0; v < k.height; v += stride) {
        for (int u = 0; u < k.width; u += stride) {
            ++score.rays_cast;
            const Vec3 dir = (view.pose.rotation * k.pixel_ray(u, v)).normalized();
            visit_ray(grid, origin, origin + k.max_range * dir, [&](const VoxelIndex& idx) {
                const std::size_t i = grid.linear(idx);
                const VoxelState s = grid.state(i);
                if (s == VoxelState::Frontier && !seen[i]) {
                    seen[i] = 1;
                    ++score.visible_frontier;
                } else if (s == VoxelState::Occupied) {
                    if (!seen[i]) {
                        seen[i] = 1;
                        ++score.visible_occupied;
                    }
                    return false;
                }
                return true;
            });
        }
    }
    return score;
}

}  // namespace

OracleScore oracle_evaluate(const CandidateView& view, const VoxelGrid& grid, const CameraIntrinsics& intrinsics,
                            int stride) {
    std::vector<std::uint8_t> seen;
    return evaluate_with(view, grid, intrinsics, std::max(stride, 1), seen);
}

std::vector<VoxelIndex> oracle_visible_frontier(const CandidateView& view, const VoxelGrid& grid,
                                               const CameraIntrinsics& intrinsics, int stride) {
    std::vector<std::uint8_t> seen;
    evaluate_with(view, grid, intrinsics, std::max(stride, 1), seen);
    std::vector<VoxelIndex> out;
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (seen[i] && grid.state(i) == VoxelState::Frontier) out.push_back(grid.unravel(i));
    return out;
}

std::vector<OracleScore> oracle_evaluate_all(const std::vector<CandidateView>& candidates, const VoxelGrid& grid,
                                             const CameraIntrinsics& intrinsics, int stride) {
    std::vector<OracleScore> scores(candidates.size());
    const auto n = static_cast<long>(candidates.size());
    ExceptionSlot slot;
#pragma omp parallel
    {
        std::vector<std::uint8_t> seen;
#pragma omp for schedule(dynamic, 4)
        for (long i = 0; i < n; ++i)
            slot.run([&] { scores[i] = evaluate_with(candidates[i], grid, intrinsics, std::max(stride, 1), seen); });
    }
    slot.rethrow();
    return scores;
}

std::vector<int> oracle_rank(const std::vector<OracleScore>& scores) {
    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a].visible_frontier > scores[b].visible_frontier; });
    return order;
}

std::vector<int> oracle_rank(const std::vector<CandidateView>& candidates, const VoxelGrid& grid,
                             const CameraIntrinsics& intrinsics, int stride) {
    return oracle_rank(oracle_evaluate_all(candidates, grid, intrinsics, stride));
}

}  // namespace nbv
