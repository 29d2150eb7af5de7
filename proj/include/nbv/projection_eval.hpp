#pragma once

#include <vector>

#include "nbv/conic.hpp"
#include "nbv/ellipsoid_fit.hpp"
#include "nbv/view_sampling.hpp"

namespace nbv {

struct RankedEllipsoid {
    const Ellipsoidd* ellipsoid = nullptr;
    double camera_z = 0;
    int rank = 0;
    double weight = 1;  // 0.5^rank
};

/// Depth-orders occupied and frontier ellipsoids jointly by camera-frame z of
/// their centers (nearest first). Equal depths: occupied before frontier, then
/// lower cluster index.
std::vector<RankedEllipsoid> rank_ellipsoids(const EllipsoidSet& set, const Posed& pose);

/// Observability weight 0.5^rank, exact in binary floating point.
double rank_weight(int rank);

/// Weighted projection mass L * W; zero for invalid projections.
double weighted_mass(const ProjectedEllipse<double>& ellipse, double weight);

struct EllipsoidContribution {
    EllipsoidKind kind = EllipsoidKind::Occupied;
    int cluster_index = 0;
    int rank = 0;
    double weight = 1;
    double area = 0;
    double weighted = 0;
};

struct ViewScore {
    double F = 0;
    double frontier_mass = 0;
    double occupied_mass = 0;
    std::vector<EllipsoidContribution> breakdown;
};

struct ProjectionOptions {
    int polygon_segments = 256;
    /// Count covered pixel centers instead of the analytic clipped area.
    bool rasterize = false;
};

ViewScore evaluate_view(const CandidateView& view, const EllipsoidSet& set, const CameraIntrinsics& intrinsics,
                        const ProjectionOptions& options = {});

/// Scores every candidate; candidates are independent and evaluated in
/// parallel. Output order matches input order.
std::vector<ViewScore> evaluate_all(const std::vector<CandidateView>& candidates, const EllipsoidSet& set,
                                    const CameraIntrinsics& intrinsics, const ProjectionOptions& options = {});

}  // namespace nbv
