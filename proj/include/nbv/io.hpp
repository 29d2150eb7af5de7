#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "nbv/ellipsoid_fit.hpp"
#include "nbv/oracle.hpp"
#include "nbv/projection_eval.hpp"
#include "nbv/render.hpp"
#include "nbv/view_sampling.hpp"
#include "nbv/voxel_grid.hpp"

namespace nbv {

/// ASCII PLY with one vertex element of float x, y, z.
void write_cloud_ply(const std::filesystem::path& path, std::span<const Vec3> points);

/// Voxel centers of every non-None voxel with an integer `state` property
/// (VoxelState numeric value).
void write_voxel_ply(const std::filesystem::path& path, const VoxelGrid& grid);

/// Depth image as ASCII PGM-like text: width height, then ranges in meters
/// with 0 for pixels without a hit.
void write_depth_text(const std::filesystem::path& path, const DepthFrame& frame);

void write_ellipsoids(const std::filesystem::path& path, const EllipsoidSet& set);

/// index,x,y,z,polar,azimuth,partition
void write_candidates_csv(const std::filesystem::path& path, const std::vector<CandidateView>& views);

/// index,F,frontier_mass,occupied_mass
void write_scores_csv(const std::filesystem::path& path, const std::vector<ViewScore>& scores);

/// index,visible_frontier,visible_occupied,eval_seconds
void write_oracle_csv(const std::filesystem::path& path, const std::vector<OracleScore>& scores,
                      const std::vector<double>& seconds);

}  // namespace nbv
