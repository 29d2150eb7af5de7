#include "nbv/io.hpp"

#include <fstream>

#include "nbv/error.hpp"

namespace nbv {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out.precision(9);
    return out;
}

}  // namespace

void write_cloud_ply(const std::filesystem::path& path, std::span<const Vec3> points) {
    auto out = open_out(path);
    out << "ply\nformat ascii 1.0\nelement vertex " << points.size()
        << "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
    for (const Vec3& p : points) out << float(p.x()) << ' ' << float(p.y()) << ' ' << float(p.z()) << '\n';
}

void write_voxel_ply(const std::filesystem::path& path, const VoxelGrid& grid) {
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid.state(i) != VoxelState::None) used.push_back(i);
    auto out = open_out(path);
    out << "ply\nformat ascii 1.0\nelement vertex " << used.size()
        << "\nproperty float x\nproperty float y\nproperty float z\nproperty int state\nend_header\n";
    for (std::size_t i : used) {
        const Vec3 c = grid.center(grid.unravel(i));
        out << float(c.x()) << ' ' << float(c.y()) << ' ' << float(c.z()) << ' ' << int(grid.state(i)) << '\n';
    }
}

void write_depth_text(const std::filesystem::path& path, const DepthFrame& frame) {
    auto out = open_out(path);
    out << frame.intrinsics.width << ' ' << frame.intrinsics.height << '\n';
    for (int v = 0; v < frame.intrinsics.height; ++v) {
        for (int u = 0; u < frame.intrinsics.width; ++u) {
            const double d = frame.at(u, v);
            out << (std::isfinite(d) ? d : 0.0) << (u + 1 < frame.intrinsics.width ? ' ' : '\n');
        }
    }
}

void write_ellipsoids(const std::filesystem::path& path, const EllipsoidSet& set) {
    auto out = open_out(path);
    write_ellipsoids(out, set);
}

void write_candidates_csv(const std::filesystem::path& path, const std::vector<CandidateView>& views) {
    auto out = open_out(path);
    out << "index,x,y,z,polar,azimuth,partition\n";
    for (const auto& v : views) {
        const Vec3 p = v.pose.translation;
        out << v.index << ',' << p.x() << ',' << p.y() << ',' << p.z() << ',' << v.polar << ',' << v.azimuth << ','
            << v.partition << '\n';
    }
}

void write_scores_csv(const std::filesystem::path& path, const std::vector<ViewScore>& scores) {
    auto out = open_out(path);
    out << "index,F,frontier_mass,occupied_mass\n";
    for (std::size_t i = 0; i < scores.size(); ++i)
        out << i << ',' << scores[i].F << ',' << scores[i].frontier_mass << ',' << scores[i].occupied_mass << '\n';
}

void write_oracle_csv(const std::filesystem::path& path, const std::vector<OracleScore>& scores,
                      const std::vector<double>& seconds) {
    auto out = open_out(path);
    out << "index,visible_frontier,visible_occupied,eval_seconds\n";
    for (std::size_t i = 0; i < scores.size(); ++i)
        out << i << ',' << scores[i].visible_frontier << ',' << scores[i].visible_occupied << ','
            << (i < seconds.size() ? seconds[i] : 0.0) << '\n';
}

}  // namespace nbv
