#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nbv/mesh.hpp"

namespace nbv {

/// `count` points uniformly distributed over the mesh surface: triangles
/// chosen with probability proportional to area, then uniform barycentric
/// coordinates.
std::vector<Vec3> sample_surface(const TriangleMesh& mesh, std::size_t count, std::uint64_t seed);

/// Fraction of `model` points with an `acquired` point within `threshold`.
/// Exact; acquired points are bucketed in a hash grid of cell size threshold.
double coverage(std::span<const Vec3> model, std::span<const Vec3> acquired, double threshold = 0.005);

}  // namespace nbv
