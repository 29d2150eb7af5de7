#include <doctest.h>

#include <random>

#include "nbv/error.hpp"
#include "nbv/planner.hpp"
#include "nbv/render.hpp"
#include "nbv/voxel_grid.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace nbv;
using nbv::testing::Cell;

namespace {

VoxelGrid unit_grid(int n) { return VoxelGrid(Vec3::Zero(), 1.0, Eigen::Vector3i::Constant(n)); }

bool allowed_transition(VoxelState from, VoxelState to) {
    using S = VoxelState;
    if (from == to) return true;
    switch (from) {
        case S::None: return to == S::Empty || to == S::Occupied || to == S::Unknown || to == S::Frontier;
        case S::Unknown: return to == S::Frontier || to == S::Empty || to == S::Occupied;
        case S::Frontier: return to == S::Empty || to == S::Occupied || to == S::Unknown;
        case S::Empty: return to == S::Occupied;
        case S::Occupied: return false;
    }
    return false;
}

}  // namespace

TEST_CASE("axis-aligned ray visits four voxels in order") {
    const VoxelGrid g = unit_grid(5);
    const auto cells = traverse_ray(g, Vec3(0.5, 0.5, 0.5), Vec3(3.5, 0.5, 0.5));
    REQUIRE(cells.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(cells[i] == VoxelIndex(i, 0, 0));
}

TEST_CASE("short segment inside one voxel") {
    const VoxelGrid g = unit_grid(5);
    const auto cells = traverse_ray(g, Vec3(2.5 + 1e-9, 1.5, 1.5), Vec3(2.5, 1.5, 1.5));
    REQUIRE(cells.size() == 1);
    CHECK(cells[0] == VoxelIndex(2, 1, 1));
    CHECK(traverse_ray(g, Vec3(1.2, 1.2, 1.2), Vec3(1.2, 1.2, 1.2)).size() == 1);
}

TEST_CASE("segment outside the grid visits nothing") {
    const VoxelGrid g = unit_grid(5);
    CHECK(traverse_ray(g, Vec3(-3, -3, -3), Vec3(-1, -2, -1)).empty());
    CHECK(traverse_ray(g, Vec3(6, 0.5, 0.5), Vec3(9, 0.5, 0.5)).empty());
}

TEST_CASE("traversal matches the dense-sampling oracle") {
    const auto r = nbv::testing::traverse_vs_dense(150, 101);
    CHECK_MESSAGE(r.pass, r.detail);
}

TEST_CASE("grid geometry is lattice-aligned") {
    const VoxelGrid g = VoxelGrid::covering(Box3(Vec3(-0.1, -0.1, -0.1), Vec3(0.1, 0.1, 0.1)), 0.03);
    for (int a = 0; a < 3; ++a) {
        const double k = g.origin()[a] / 0.03;
        CHECK(std::abs(k - std::round(k)) < 1e-9);
    }
    CHECK(g.span().contains(Box3(Vec3(-0.1, -0.1, -0.1), Vec3(0.1, 0.1, 0.1))));
    const auto idx = g.voxel_of(Vec3(0.001, 0.001, 0.001));
    REQUIRE(idx);
    CHECK(g.cell(*idx).contains(Vec3(0.001, 0.001, 0.001)));
    CHECK(g.unravel(g.linear(*idx)) == *idx);
}

TEST_CASE("ensure_contains grows without moving voxel boundaries") {
    VoxelGrid g = VoxelGrid::covering(Box3(Vec3::Zero(), Vec3::Constant(0.3)), 0.03);
    const Vec3 p(0.1, 0.2, 0.05);
    g.set_state(*g.voxel_of(p), VoxelState::Occupied);
    const Box3 cell_before = g.cell(*g.voxel_of(p));
    CHECK(g.ensure_contains(Box3(Vec3::Constant(-0.2), Vec3::Constant(0.5))));
    CHECK_FALSE(g.ensure_contains(Box3(Vec3::Zero(), Vec3::Constant(0.1))));
    const auto idx = g.voxel_of(p);
    REQUIRE(idx);
    CHECK(g.state(*idx) == VoxelState::Occupied);
    CHECK((g.cell(*idx).min() - cell_before.min()).norm() < 1e-12);
    CHECK(g.counts().occupied == 1);
}

TEST_CASE("single point observation") {
    VoxelGrid g = unit_grid(8);
    g.set_bbox(Box3(Vec3::Zero(), Vec3::Constant(8)));
    Observation obs;
    obs.sensor_origin = Vec3(0.5, 4.5, 4.5);
    obs.points = {Vec3(4.5, 4.5, 4.5)};
    integrate_observation(g, obs);
    CHECK(g.counts().occupied == 1);
    CHECK(g.state(VoxelIndex(4, 4, 4)) == VoxelState::Occupied);
    for (int x = 0; x < 4; ++x) CHECK(g.state(VoxelIndex(x, 4, 4)) == VoxelState::Empty);
    for (int x = 5; x < 8; ++x) CHECK(g.state(VoxelIndex(x, 4, 4)) == VoxelState::Unknown);
    CHECK(g.counts().empty == 4);
    CHECK(g.counts().unknown == 3);

    SUBCASE("integration is idempotent") {
        const std::vector<VoxelState> before(g.states().begin(), g.states().end());
        const auto counts = integrate_observation(g, obs);
        CHECK(std::equal(before.begin(), before.end(), g.states().begin()));
        CHECK(counts.to_empty + counts.to_occupied + counts.to_unknown == 0);
    }
    SUBCASE("no occluded space outside B") {
        VoxelGrid h = unit_grid(8);
        h.set_bbox(Box3(Vec3::Zero(), Vec3(5, 8, 8)));
        integrate_observation(h, obs);
        CHECK(h.counts().unknown == 0);
    }
    SUBCASE("occupied is never demoted") {
        Observation through;
        through.sensor_origin = obs.sensor_origin;
        through.points = {Vec3(7.5, 4.5, 4.5)};
        integrate_observation(g, through);
        CHECK(g.state(VoxelIndex(4, 4, 4)) == VoxelState::Occupied);
        CHECK(g.state(VoxelIndex(5, 4, 4)) == VoxelState::Unknown);
        CHECK(g.state(VoxelIndex(7, 4, 4)) == VoxelState::Occupied);
    }
}

TEST_CASE("frontier predicate") {
    VoxelGrid g = unit_grid(3);
    g.set_state(VoxelIndex(1, 1, 1), VoxelState::Unknown);
    g.set_state(VoxelIndex(0, 1, 1), VoxelState::Empty);
    g.set_state(VoxelIndex(2, 1, 1), VoxelState::Occupied);
    auto f = update_frontier(g);
    REQUIRE(f.size() == 1);
    CHECK(g.state(VoxelIndex(1, 1, 1)) == VoxelState::Frontier);

    VoxelGrid h = unit_grid(3);
    for (std::size_t i = 0; i < h.size(); ++i) h.set_state(h.unravel(i), VoxelState::Unknown);
    CHECK(update_frontier(h).empty());
    CHECK(h.counts().unknown == 27);

    SUBCASE("diagonal contacts count") {
        VoxelGrid d = unit_grid(3);
        d.set_state(VoxelIndex(1, 1, 1), VoxelState::Unknown);
        d.set_state(VoxelIndex(0, 0, 0), VoxelState::Empty);
        d.set_state(VoxelIndex(2, 2, 2), VoxelState::Occupied);
        CHECK(update_frontier(d).size() == 1);
    }
    SUBCASE("frontier reverts when the evidence disappears") {
        g.set_state(VoxelIndex(0, 1, 1), VoxelState::Occupied);
        CHECK(update_frontier(g).empty());
        CHECK(g.state(VoxelIndex(1, 1, 1)) == VoxelState::Unknown);
    }
}

TEST_CASE("hand-built 5x5x5 grid agrees with the brute-force predicate") {
    VoxelGrid g = unit_grid(5);
    const VoxelState pattern[] = {VoxelState::Empty, VoxelState::Unknown, VoxelState::Occupied, VoxelState::Unknown,
                                  VoxelState::None};
    for (std::size_t i = 0; i < g.size(); ++i) g.set_state(g.unravel(i), pattern[(i * 7 + i / 5) % 5]);
    update_frontier(g);
    int frontier = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const VoxelIndex idx = g.unravel(i);
        const Cell c{idx.x(), idx.y(), idx.z()};
        const VoxelState s = g.state(i);
        if (s == VoxelState::Frontier) {
            ++frontier;
            CHECK(nbv::testing::brute_frontier(g, c));
        }
        if (s == VoxelState::Unknown) CHECK_FALSE(nbv::testing::brute_frontier(g, c));
    }
    CHECK(frontier > 0);
    const auto r = nbv::testing::frontier_vs_brute(20, 202);
    CHECK_MESSAGE(r.pass, r.detail);
}

TEST_CASE("first-frame bbox doubles its diagonal on the far side") {
    VoxelGrid g = unit_grid(20);
    for (int x = 2; x < 5; ++x)
        for (int y = 2; y < 5; ++y)
            for (int z = 2; z < 5; ++z) g.set_state(VoxelIndex(x, y, z), VoxelState::Occupied);
    const Box3 b = update_bbox(g, Vec3::UnitX(), true, 2.0);
    const double d = std::sqrt(27.0);
    CHECK(b.diagonal().norm() == doctest::Approx(2 * d));
    CHECK(b.min().x() == doctest::Approx(2.0));
    CHECK(b.min().y() == doctest::Approx(2.0));
    CHECK(b.max().y() == doctest::Approx(5.0));
    CHECK(b.max().x() > 5.0);
    CHECK(g.bbox().isApprox(b));

    SUBCASE("oblique view grows along each positive component") {
        const Box3 o = update_bbox(g, Vec3(-1, 1, 0).normalized(), true, 2.0);
        CHECK(o.diagonal().norm() == doctest::Approx(2 * d));
        CHECK(o.min().x() < 2.0);
        CHECK(o.max().y() > 5.0);
        CHECK(o.max().x() == doctest::Approx(5.0));
        CHECK(o.min().y() == doctest::Approx(2.0));
    }
}

TEST_CASE("later-frame bbox") {
    VoxelGrid g = unit_grid(10);
    g.set_state(VoxelIndex(3, 3, 3), VoxelState::Occupied);
    g.set_state(VoxelIndex(4, 3, 3), VoxelState::Occupied);
    g.set_state(VoxelIndex(5, 5, 5), VoxelState::Empty);
    SUBCASE("occupied only") {
        const Box3 b = update_bbox(g, Vec3::UnitX(), false, 2.0);
        CHECK(b.isApprox(Box3(Vec3(3, 3, 3), Vec3(5, 4, 4))));
    }
    SUBCASE("frontier corner inflated by gamma") {
        g.set_state(VoxelIndex(8, 8, 8), VoxelState::Frontier);
        const Box3 b = update_bbox(g, Vec3::UnitX(), false, 2.0);
        CHECK(b.max().isApprox(Vec3::Constant(8.5 + 2.0)));
        CHECK(b.min().isApprox(Vec3(3, 3, 3)));
        CHECK(b.contains(Box3(Vec3(3, 3, 3), Vec3(5, 4, 4))));
    }
    SUBCASE("unknown cells included") {
        g.set_state(VoxelIndex(0, 1, 2), VoxelState::Unknown);
        const Box3 b = update_bbox(g, Vec3::UnitX(), false, 2.0);
        CHECK(b.min().isApprox(Vec3(0, 1, 2)));
    }
    SUBCASE("nothing occupied") {
        VoxelGrid e = unit_grid(4);
        CHECK_THROWS_AS(update_bbox(e, Vec3::UnitX(), true, 2.0), EmptyInputError);
    }
}

TEST_CASE("preprocessing crops and thins deterministically") {
    const std::vector<Vec3> pts = {Vec3(0, 0, 0), Vec3(0.001, 0, 0), Vec3(0.02, 0, 0), Vec3(5, 0, 0)};
    const auto out = preprocess_points(pts, Box3(Vec3::Constant(-1), Vec3::Constant(1)), 0.015);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == pts[0]);
    CHECK(out[1] == pts[2]);
}

TEST_CASE("a second opposing view lowers the unknown count and transitions stay legal") {
    const RayCaster scene(make_uv_sphere(Vec3::Zero(), 0.1));
    VoxelGrid g = VoxelGrid::covering(Box3(Vec3::Constant(-0.5), Vec3::Constant(0.5)), 0.03);
    const CameraIntrinsics k;
    auto observe = [&](const Vec3& eye) {
        Observation obs;
        obs.sensor_origin = eye;
        obs.points = preprocess_points(frame_to_points(render_depth(scene, look_at<double>(eye, Vec3::Zero(), Vec3::UnitZ()), k)),
                                       g.span(), 0.015);
        return obs;
    };
    const Observation a = observe(Vec3(0.6, 0, 0));
    const Observation b = observe(Vec3(-0.6, 0, 0));

    integrate_observation(g, a);
    update_bbox(g, Vec3(-1, 0, 0), true, 0.06);
    integrate_observation(g, a);
    update_frontier(g);
    const StateCounts first = g.counts();
    CHECK(first.unknown + first.frontier > 0);
    CHECK(g.bbox().contains(Box3(Vec3::Constant(-0.09), Vec3::Constant(0.09))));

    const std::vector<VoxelState> before(g.states().begin(), g.states().end());
    integrate_observation(g, b);
    update_frontier(g);
    const StateCounts second = g.counts();
    CHECK(second.unknown + second.frontier < first.unknown + first.frontier);
    CHECK(second.occupied >= first.occupied);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!allowed_transition(before[i], g.state(i))) {
            CAPTURE(i);
            FAIL("illegal transition ", to_string(before[i]), " -> ", to_string(g.state(i)));
        }
    }
    // B keeps bbox(V_o) after the later-frame update.
    Box3 occ;
    for (const auto& idx : g.voxels_in(VoxelState::Occupied)) occ.extend(g.cell(idx));
    CHECK(update_bbox(g, Vec3::UnitX(), false, 0.06).contains(occ));
}
