#pragma once

#include <vector>

#include "nbv/view_sampling.hpp"
#include "nbv/voxel_grid.hpp"

namespace nbv {

struct OracleScore {
    long visible_frontier = 0;
    long visible_occupied = 0;
    long rays_cast = 0;
};

/// Ray-casting viewpoint score: one ray per `stride`-th pixel (both axes),
/// traversed through the grid up to the sensor range. A ray stops at the
/// first Occupied voxel; every Frontier voxel it passes before that is
/// visible. Counts are over unique voxels.
OracleScore oracle_evaluate(const CandidateView& view, const VoxelGrid& grid, const CameraIntrinsics& intrinsics,
                            int stride = 4);

/// The Frontier voxels counted by oracle_evaluate, in linear-index order.
std::vector<VoxelIndex> oracle_visible_frontier(const CandidateView& view, const VoxelGrid& grid,
                                               const CameraIntrinsics& intrinsics, int stride = 4);

std::vector<OracleScore> oracle_evaluate_all(const std::vector<CandidateView>& candidates, const VoxelGrid& grid,
                                             const CameraIntrinsics& intrinsics, int stride = 4);

/// Candidate positions (indices into `candidates`) sorted by visible_frontier
/// descending; stable, so ties keep input order.
std::vector<int> oracle_rank(const std::vector<OracleScore>& scores);
std::vector<int> oracle_rank(const std::vector<CandidateView>& candidates, const VoxelGrid& grid,
                             const CameraIntrinsics& intrinsics, int stride = 4);

}  // namespace nbv
