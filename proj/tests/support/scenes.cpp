#include "scenes.hpp"

#include <cmath>

namespace nbv::testing {

const std::vector<std::string>& desk_meshes() {
    static const std::vector<std::string> names = {"sphere", "cube", "torus", "lblock", "stairs"};
    return names;
}

bool is_convex(const std::string& name) { return name == "sphere" || name == "cube"; }

RunConfig desk_config(const std::string& mesh_name) {
    RunConfig c;
    c.mesh = "builtin:" + mesh_name;
    return c;
}

PlannerState mid_scan(const PlannerConfig& config, const RayCaster& scene, int iterations) {
    PlannerState state = initialize_planner(config, scene);
    for (int i = 0; i < iterations && !should_terminate(state); ++i) run_iteration(state, scene);
    return state;
}

DepthFrame analytic_sphere_frame(const Vec3& center, double radius, const Posed& pose,
                                 const CameraIntrinsics& intrinsics) {
    DepthFrame frame;
    frame.pose = pose;
    frame.intrinsics = intrinsics;
    frame.depths.assign(static_cast<std::size_t>(intrinsics.width) * intrinsics.height, kNoHit);
    for (int v = 0; v < intrinsics.height; ++v)
        for (int u = 0; u < intrinsics.width; ++u) {
            const Vec3 d = (pose.rotation * intrinsics.pixel_ray(u, v)).normalized();
            const Vec3 oc = pose.translation - center;
            const double b = oc.dot(d);
            const double disc = b * b - (oc.squaredNorm() - radius * radius);
            if (disc < 0) continue;
            const double t = -b - std::sqrt(disc);
            if (t > 0 && t <= intrinsics.max_range) frame.at(u, v) = t;
        }
    return frame;
}

TriangleMesh wall_mesh(double x) { return make_box(Vec3(x - 0.01, -1, -1), Vec3(x + 0.01, 1, 1), 1); }

}  // namespace nbv::testing
