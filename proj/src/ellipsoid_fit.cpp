#include "nbv/ellipsoid_fit.hpp"

#include <ostream>

namespace nbv {

ClassFit fit_voxel_class(std::span<const Vec3> centers, EllipsoidKind kind, double resolution,
                         const RefitOptions& options) {
    ClassFit out;
    if (centers.empty()) return out;

    GmmOptions<double> gmm;
    gmm.covariance_floor = (resolution / 4) * (resolution / 4);
    gmm.max_iterations = options.em_max_iterations;
    gmm.tolerance = options.em_tolerance;
    const auto selection = select_components<double>(centers, options.max_components, options.seed, gmm);
    out.components = selection.components;

    MveeOptions<double> mvee;
    mvee.tolerance = options.mvee_tolerance;
    mvee.inflation = resolution / 2;
    mvee.max_iterations = options.mvee_max_iterations;
    for (const auto& cluster : selection.fit.assignment.clusters) {
        if (cluster.empty()) continue;
        std::vector<Vec3> members;
        members.reserve(cluster.size());
        for (int i : cluster) members.push_back(centers[i]);
        Ellipsoidd e = fit_mvee<double>(members, mvee).ellipsoid;
        e.kind = kind;
        e.cluster_index = static_cast<int>(out.ellipsoids.size());
        out.ellipsoids.push_back(e);
    }
    return out;
}

EllipsoidSet refit_all(const VoxelGrid& grid, const RefitOptions& options) {
    const auto occupied = grid.centers_in(VoxelState::Occupied);
    if (occupied.empty()) throw EmptyInputError("refit needs at least one occupied voxel");
    const auto frontier = grid.centers_in(VoxelState::Frontier);
    EllipsoidSet set;
    set.occupied = fit_voxel_class(occupied, EllipsoidKind::Occupied, grid.resolution(), options).ellipsoids;
    set.frontier = fit_voxel_class(frontier, EllipsoidKind::Frontier, grid.resolution(), options).ellipsoids;
    return set;
}

void write_ellipsoids(std::ostream& out, const EllipsoidSet& set) {
    out << "# kind cx cy cz a00 a01 a02 a11 a12 a22 member_count\n";
    for (const auto* list : {&set.occupied, &set.frontier}) {
        for (const auto& e : *list) {
            const auto& a = e.shape;
            out << to_string(e.kind) << ' ' << e.center.x() << ' ' << e.center.y() << ' ' << e.center.z() << ' '
                << a(0, 0) << ' ' << a(0, 1) << ' ' << a(0, 2) << ' ' << a(1, 1) << ' ' << a(1, 2) << ' ' << a(2, 2)
                << ' ' << e.member_count << '\n';
        }
    }
}

}  // namespace nbv
