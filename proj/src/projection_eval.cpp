#include "nbv/projection_eval.hpp"
#include "nbv/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace nbv {

std::vector<RankedEllipsoid> rank_ellipsoids(const EllipsoidSet& set, const Posed& pose) {
    std::vector<RankedEllipsoid> ranked;
    ranked.reserve(set.size());
    for (const auto* list : {&set.occupied, &set.frontier})
        for (const auto& e : *list) ranked.push_back({&e, pose.to_camera(e.center).z(), 0, 1.0});
    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedEllipsoid& a, const RankedEllipsoid& b) {
        if (a.camera_z != b.camera_z) return a.camera_z < b.camera_z;
        if (a.ellipsoid->kind != b.ellipsoid->kind) return a.ellipsoid->kind == EllipsoidKind::Occupied;
        return a.ellipsoid->cluster_index < b.ellipsoid->cluster_index;
    });
    for (std::size_t r = 0; r < ranked.size(); ++r) {
        ranked[r].rank = static_cast<int>(r);
        ranked[r].weight = rank_weight(static_cast<int>(r));
    }
    return ranked;
}

double rank_weight(int rank) { return std::ldexp(1.0, -rank); }

double weighted_mass(const ProjectedEllipse<double>& ellipse, double weight) {
    return ellipse.valid ? ellipse.clipped_area * weight : 0.0;
}

ViewScore evaluate_view(const CandidateView& view, const EllipsoidSet& set, const CameraIntrinsics& intrinsics,
                        const ProjectionOptions& options) {
    ViewScore score;
    for (const RankedEllipsoid& r : rank_ellipsoids(set, view.pose)) {
        auto ellipse = project_ellipsoid<double>(*r.ellipsoid, view.pose, intrinsics, options.polygon_segments);
        if (options.rasterize && ellipse.valid) ellipse.clipped_area = double(rasterized_area(ellipse, intrinsics));
        const double mass = weighted_mass(ellipse, r.weight);
        EllipsoidContribution c;
        c.kind = r.ellipsoid->kind;
        c.cluster_index = r.ellipsoid->cluster_index;
        c.rank = r.rank;
        c.weight = r.weight;
        c.area = ellipse.valid ? ellipse.clipped_area : 0.0;
        c.weighted = mass;
        score.breakdown.push_back(c);
        if (c.kind == EllipsoidKind::Frontier)
            score.frontier_mass += mass;
        else
            score.occupied_mass += mass;
    }
    score.F = score.frontier_mass - score.occupied_mass;
    return score;
}

std::vector<ViewScore> evaluate_all(const std::vector<CandidateView>& candidates, const EllipsoidSet& set,
                                    const CameraIntrinsics& intrinsics, const ProjectionOptions& options) {
    std::vector<ViewScore> scores(candidates.size());
    const auto n = static_cast<long>(candidates.size());
    ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) slot.run([&] { scores[i] = evaluate_view(candidates[i], set, intrinsics, options); });
    slot.rethrow();
    return scores;
}

}  // namespace nbv
