#include "nbv/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "nbv/error.hpp"

namespace nbv {

namespace {

constexpr double kMinTriangleArea = 1e-14;

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& tok, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw FormatError("line " + std::to_string(line) + ": expected a number, got '" + tok + "'");
    }
}

long parse_long(const std::string& tok, std::size_t line) {
    long v = 0;
    const auto* end = tok.data() + tok.size();
    const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        throw FormatError("line " + std::to_string(line) + ": expected an integer, got '" + tok + "'");
    return v;
}

/// Fan-triangulates `polygon` into `mesh`, dropping degenerate triangles.
void add_polygon(TriangleMesh& mesh, const std::vector<int>& polygon) {
    for (std::size_t i = 1; i + 1 < polygon.size(); ++i) {
        const std::array<int, 3> tri{polygon[0], polygon[i], polygon[i + 1]};
        const Vec3& a = mesh.vertices[tri[0]];
        const Vec3& b = mesh.vertices[tri[1]];
        const Vec3& c = mesh.vertices[tri[2]];
        if (0.5 * (b - a).cross(c - a).norm() > kMinTriangleArea) mesh.triangles.push_back(tri);
    }
}

void check_nonempty(const TriangleMesh& mesh) {
    if (mesh.vertices.empty() || mesh.triangles.empty()) throw EmptyInputError("mesh has no triangles");
}

}  // namespace

Box3 TriangleMesh::bounds() const {
    Box3 box;
    for (const auto& v : vertices) box.extend(v);
    return box;
}

double TriangleMesh::triangle_area(std::size_t i) const {
    const auto& t = triangles[i];
    return 0.5 * (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).norm();
}

double TriangleMesh::surface_area() const {
    double area = 0.0;
    for (std::size_t i = 0; i < triangles.size(); ++i) area += triangle_area(i);
    return area;
}

TriangleMesh parse_obj(std::istream& in) {
    TriangleMesh mesh;
    std::vector<std::vector<int>> faces;
    std::vector<std::size_t> face_lines;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        std::istringstream ls(s);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            std::string x, y, z;
            if (!(ls >> x >> y >> z))
                throw FormatError("line " + std::to_string(line) + ": vertex needs three coordinates");
            mesh.vertices.emplace_back(parse_double(x, line), parse_double(y, line), parse_double(z, line));
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string tok;
            while (ls >> tok) {
                const std::string idx = tok.substr(0, tok.find('/'));
                long i = parse_long(idx, line);
                if (i < 0) i += static_cast<long>(mesh.vertices.size()) + 1;
                if (i < 1)
                    throw FormatError("line " + std::to_string(line) + ": invalid vertex index '" + tok + "'");
                poly.push_back(static_cast<int>(i - 1));
            }
            if (poly.size() < 3)
                throw FormatError("line " + std::to_string(line) + ": face needs at least three vertices");
            faces.push_back(std::move(poly));
            face_lines.push_back(line);
        }
        // Other records (vn, vt, g, o, s, usemtl, ...) carry nothing we need.
    }
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (int i : faces[f])
            if (i >= static_cast<int>(mesh.vertices.size()))
                throw FormatError("line " + std::to_string(face_lines[f]) + ": vertex index out of range");
        add_polygon(mesh, faces[f]);
    }
    check_nonempty(mesh);
    return mesh;
}

TriangleMesh parse_ply(std::istream& in) {
    struct Element {
        std::string name;
        std::size_t count = 0;
        std::vector<std::string> properties;
        bool has_list = false;
    };

    std::string raw;
    std::size_t line = 0;
    auto next_line = [&](const char* what) {
        if (!std::getline(in, raw))
            throw FormatError("line " + std::to_string(line + 1) + ": unexpected end of file, expected " + what);
        ++line;
        return trim(raw);
    };

    if (next_line("'ply' magic") != "ply") throw FormatError("line 1: missing 'ply' magic");
    std::vector<Element> elements;
    bool ascii = false;
    for (;;) {
        const std::string s = next_line("header");
        std::istringstream ls(s);
        std::string tag;
        ls >> tag;
        if (tag == "end_header") break;
        if (tag == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt != "ascii")
                throw FormatError("line " + std::to_string(line) + ": only ascii PLY is supported");
            ascii = true;
        } else if (tag == "element") {
            Element e;
            std::string count;
            ls >> e.name >> count;
            e.count = static_cast<std::size_t>(parse_long(count, line));
            elements.push_back(e);
        } else if (tag == "property") {
            if (elements.empty())
                throw FormatError("line " + std::to_string(line) + ": property before any element");
            std::string type;
            ls >> type;
            std::string name;
            if (type == "list") {
                std::string count_type, item_type;
                ls >> count_type >> item_type >> name;
                elements.back().has_list = true;
            } else {
                ls >> name;
            }
            elements.back().properties.push_back(name);
        }
    }
    if (!ascii) throw FormatError("line " + std::to_string(line) + ": missing 'format ascii' line");

    TriangleMesh mesh;
    std::vector<std::vector<int>> faces;
    for (const Element& e : elements) {
        for (std::size_t r = 0; r < e.count; ++r) {
            std::istringstream ls(next_line(e.name.c_str()));
            std::vector<std::string> toks;
            for (std::string t; ls >> t;) toks.push_back(t);
            if (e.name == "vertex") {
                if (toks.size() < e.properties.size())
                    throw FormatError("line " + std::to_string(line) + ": vertex record too short");
                Vec3 v = Vec3::Zero();
                for (std::size_t p = 0; p < e.properties.size(); ++p) {
                    const auto& name = e.properties[p];
                    if (name == "x") v.x() = parse_double(toks[p], line);
                    if (name == "y") v.y() = parse_double(toks[p], line);
                    if (name == "z") v.z() = parse_double(toks[p], line);
                }
                mesh.vertices.push_back(v);
            } else if (e.name == "face") {
                if (toks.empty()) throw FormatError("line " + std::to_string(line) + ": empty face record");
                const long n = parse_long(toks[0], line);
                if (n < 3 || static_cast<std::size_t>(n) + 1 > toks.size())
                    throw FormatError("line " + std::to_string(line) + ": malformed face record");
                std::vector<int> poly;
                for (long k = 1; k <= n; ++k) {
                    const long idx = parse_long(toks[k], line);
                    if (idx < 0) throw FormatError("line " + std::to_string(line) + ": negative vertex index");
                    poly.push_back(static_cast<int>(idx));
                }
                faces.push_back(std::move(poly));
            }
        }
    }
    for (const auto& f : faces) {
        for (int i : f)
            if (i >= static_cast<int>(mesh.vertices.size()))
                throw FormatError("face references vertex " + std::to_string(i) + " beyond vertex count");
        add_polygon(mesh, f);
    }
    check_nonempty(mesh);
    return mesh;
}

TriangleMesh load_mesh(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open mesh file " + path.string());
    const std::string ext = lower(path.extension().string());
    try {
        if (ext == ".obj") return parse_obj(in);
        if (ext == ".ply") return parse_ply(in);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    throw FormatError(path.string() + ": unsupported mesh extension '" + ext + "'");
}

void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out.precision(10);
    for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

TriangleMesh make_uv_sphere(const Vec3& center, double radius, int stacks, int slices) {
    TriangleMesh mesh;
    const double pi = std::numbers::pi;
    mesh.vertices.push_back(center + Vec3(0, 0, radius));
    for (int i = 1; i < stacks; ++i) {
        const double polar = pi * i / stacks;
        for (int j = 0; j < slices; ++j) {
            const double az = 2 * pi * j / slices;
            mesh.vertices.push_back(center + radius * Vec3(std::sin(polar) * std::cos(az),
                                                           std::sin(polar) * std::sin(az), std::cos(polar)));
        }
    }
    const int south = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(center - Vec3(0, 0, radius));
    auto ring = [&](int i, int j) { return 1 + (i - 1) * slices + (j % slices); };
    for (int j = 0; j < slices; ++j) mesh.triangles.push_back({0, ring(1, j), ring(1, j + 1)});
    for (int i = 1; i + 1 < stacks; ++i) {
        for (int j = 0; j < slices; ++j) {
            mesh.triangles.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
            mesh.triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
        }
    }
    for (int j = 0; j < slices; ++j) mesh.triangles.push_back({ring(stacks - 1, j), south, ring(stacks - 1, j + 1)});
    return mesh;
}

TriangleMesh make_box(const Vec3& lo, const Vec3& hi, int subdivisions) {
    TriangleMesh mesh;
    const int n = std::max(1, subdivisions);
    // One grid of (n+1)^2 vertices per face; faces share no vertices, which
    // is harmless for rendering and sampling.
    for (int axis = 0; axis < 3; ++axis) {
        for (int side = 0; side < 2; ++side) {
            const int u = (axis + 1) % 3;
            const int v = (axis + 2) % 3;
            const int base = static_cast<int>(mesh.vertices.size());
            for (int i = 0; i <= n; ++i) {
                for (int j = 0; j <= n; ++j) {
                    Vec3 p;
                    p[axis] = side ? hi[axis] : lo[axis];
                    p[u] = lo[u] + (hi[u] - lo[u]) * i / n;
                    p[v] = lo[v] + (hi[v] - lo[v]) * j / n;
                    mesh.vertices.push_back(p);
                }
            }
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const int a = base + i * (n + 1) + j;
                    const int b = a + (n + 1);
                    if (side) {
                        mesh.triangles.push_back({a, b, b + 1});
                        mesh.triangles.push_back({a, b + 1, a + 1});
                    } else {
                        mesh.triangles.push_back({a, b + 1, b});
                        mesh.triangles.push_back({a, a + 1, b + 1});
                    }
                }
            }
        }
    }
    return mesh;
}

TriangleMesh make_torus(const Vec3& center, double major_radius, double minor_radius, int rings, int sides) {
    TriangleMesh mesh;
    const double pi = std::numbers::pi;
    for (int i = 0; i < rings; ++i) {
        const double u = 2 * pi * i / rings;
        for (int j = 0; j < sides; ++j) {
            const double v = 2 * pi * j / sides;
            const double r = major_radius + minor_radius * std::cos(v);
            mesh.vertices.push_back(center + Vec3(r * std::cos(u), r * std::sin(u), minor_radius * std::sin(v)));
        }
    }
    auto id = [&](int i, int j) { return (i % rings) * sides + (j % sides); };
    for (int i = 0; i < rings; ++i) {
        for (int j = 0; j < sides; ++j) {
            mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return mesh;
}

TriangleMesh make_polycube(const std::vector<std::array<int, 3>>& cells, double cell_size, const Vec3& center) {
    if (cells.empty()) throw EmptyInputError("polycube needs at least one cell");
    const std::set<std::array<int, 3>> filled(cells.begin(), cells.end());
    std::array<int, 3> lo{cells[0]}, hi{cells[0]};
    for (const auto& c : filled)
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], c[a]);
            hi[a] = std::max(hi[a], c[a] + 1);
        }
    Vec3 offset;
    for (int a = 0; a < 3; ++a) offset[a] = center[a] - 0.5 * (lo[a] + hi[a]) * cell_size;

    TriangleMesh mesh;
    std::map<std::array<int, 3>, int> corner_index;
    auto corner = [&](std::array<int, 3> k) {
        auto [it, inserted] = corner_index.try_emplace(k, static_cast<int>(mesh.vertices.size()));
        if (inserted) mesh.vertices.push_back(offset + cell_size * Vec3(k[0], k[1], k[2]));
        return it->second;
    };
    for (const auto& c : filled) {
        for (int axis = 0; axis < 3; ++axis) {
            for (int side = 0; side < 2; ++side) {
                auto nb = c;
                nb[axis] += side ? 1 : -1;
                if (filled.count(nb)) continue;
                const int u = (axis + 1) % 3;
                const int v = (axis + 2) % 3;
                std::array<int, 3> k = c;
                k[axis] += side;
                auto at = [&](int du, int dv) {
                    auto q = k;
                    q[u] += du;
                    q[v] += dv;
                    return corner(q);
                };
                const int a = at(0, 0), b = at(1, 0), d = at(1, 1), e = at(0, 1);
                if (side) {
                    mesh.triangles.push_back({a, b, d});
                    mesh.triangles.push_back({a, d, e});
                } else {
                    mesh.triangles.push_back({a, d, b});
                    mesh.triangles.push_back({a, e, d});
                }
            }
        }
    }
    return mesh;
}

std::vector<std::string> named_meshes() { return {"sphere", "cube", "torus", "lblock", "stairs"}; }

TriangleMesh make_named_mesh(const std::string& name) {
    const Vec3 origin = Vec3::Zero();
    if (name == "sphere") return make_uv_sphere(origin, 0.15);
    if (name == "cube") return make_box(Vec3::Constant(-0.12), Vec3::Constant(0.12), 4);
    if (name == "torus") return make_torus(origin, 0.12, 0.05);
    if (name == "lblock") {
        // L-shaped slab: 3x3 footprint with one 2x2 corner removed, two cells tall.
        std::vector<std::array<int, 3>> cells;
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    if (i == 0 || j == 0) cells.push_back({i, j, k});
        return make_polycube(cells, 0.1, origin);
    }
    if (name == "stairs") {
        // Three-step staircase, 2 cells deep.
        std::vector<std::array<int, 3>> cells;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k <= i; ++k)
                for (int j = 0; j < 2; ++j) cells.push_back({i, j, k});
        return make_polycube(cells, 0.1, origin);
    }
    throw ConfigError("unknown mesh name '" + name + "'");
}

}  // namespace nbv
