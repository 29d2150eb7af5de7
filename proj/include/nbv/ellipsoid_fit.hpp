#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nbv/ellipsoid.hpp"
#include "nbv/gmm.hpp"
#include "nbv/mvee.hpp"
#include "nbv/voxel_grid.hpp"

namespace nbv {

struct EllipsoidSet {
    std::vector<Ellipsoidd> occupied;
    std::vector<Ellipsoidd> frontier;

    std::size_t size() const { return occupied.size() + frontier.size(); }
    bool empty() const { return occupied.empty() && frontier.empty(); }
};

struct RefitOptions {
    int max_components = 10;
    std::uint64_t seed = 0;
    double mvee_tolerance = 1e-3;
    int mvee_max_iterations = 1000;
    int em_max_iterations = 200;
    double em_tolerance = 1e-6;
};

struct ClassFit {
    std::vector<Ellipsoidd> ellipsoids;
    int components = 0;
};

/// Clusters `centers` by BIC-selected GMM and fits one MVEE per nonempty
/// cluster. Covariance floor is (resolution / 4)^2 and degenerate clusters
/// are inflated by resolution / 2.
ClassFit fit_voxel_class(std::span<const Vec3> centers, EllipsoidKind kind, double resolution,
                         const RefitOptions& options);

/// Fits occupied and frontier voxel classes independently. Throws
/// EmptyInputError when the grid has no occupied voxel.
EllipsoidSet refit_all(const VoxelGrid& grid, const RefitOptions& options);

/// One line per ellipsoid: kind cx cy cz a00 a01 a02 a11 a12 a22 member_count.
void write_ellipsoids(std::ostream& out, const EllipsoidSet& set);

}  // namespace nbv
