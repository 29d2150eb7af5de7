#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "nbv/geometry.hpp"

namespace nbv {

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;

    bool empty() const { return triangles.empty(); }
    Box3 bounds() const;
    double triangle_area(std::size_t i) const;
    double surface_area() const;
};

/// Loads an ASCII OBJ or PLY mesh, chosen by file extension. Polygons are
/// fan-triangulated and zero-area triangles dropped.
TriangleMesh load_mesh(const std::filesystem::path& path);

TriangleMesh parse_obj(std::istream& in);
TriangleMesh parse_ply(std::istream& in);

void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path);

// Procedural desk objects used by tests, benchmarks and the `mesh` CLI command.
TriangleMesh make_uv_sphere(const Vec3& center, double radius, int stacks = 48, int slices = 96);
TriangleMesh make_box(const Vec3& min_corner, const Vec3& max_corner, int subdivisions = 1);
TriangleMesh make_torus(const Vec3& center, double major_radius, double minor_radius, int rings = 96,
                        int sides = 48);

/// Boundary surface of a union of unit cells on an integer lattice. `cells`
/// holds (i, j, k) cell coordinates; each cell spans `cell_size` meters and
/// the lattice is placed so that its bounding box is centered on `center`.
TriangleMesh make_polycube(const std::vector<std::array<int, 3>>& cells, double cell_size, const Vec3& center);

/// Named desk object: "sphere", "cube", "torus", "lblock", "stairs".
TriangleMesh make_named_mesh(const std::string& name);
std::vector<std::string> named_meshes();

}  // namespace nbv
