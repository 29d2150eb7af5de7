#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nbv/error.hpp"
#include "nbv/view_sampling.hpp"

using namespace nbv;

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
}

TEST_CASE("sampling radius") {
    CHECK(sampling_radius(Box3(Vec3::Zero(), Vec3::Ones()), 0.4) == doctest::Approx(0.4 + std::sqrt(3.0) / 2));
    CHECK(sampling_radius(Box3(Vec3::Zero(), Vec3::Ones()), 0.4) == doctest::Approx(1.2660).epsilon(1e-4));
    const Box3 voxel(Vec3::Zero(), Vec3::Constant(0.03));
    CHECK(sampling_radius(voxel, 0.4) == doctest::Approx(0.4 + voxel.diagonal().norm() / 2));
    const Box3 small(Vec3::Zero(), Vec3(0.1, 0.2, 0.3));
    const Box3 big(Vec3::Zero(), Vec3(0.2, 0.4, 0.6));
    CHECK(sampling_radius(big, 0.4) - sampling_radius(small, 0.4) ==
          doctest::Approx(small.diagonal().norm() / 2));
}

TEST_CASE("single hemisphere ring") {
    SamplingConfig c;
    c.mode = SamplingMode::Hemisphere;
    c.parallels = 1;
    c.candidates = 4;
    const auto views = sample_candidates(c, Vec3::Zero(), 1.0);
    REQUIRE(views.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(views[i].polar == doctest::Approx(views[0].polar));
        CHECK(views[i].azimuth == doctest::Approx(views[0].azimuth + i * std::numbers::pi / 2));
    }
}

TEST_CASE("parallel polar angles") {
    const auto full = parallel_polar_angles(SamplingMode::FullSphere, 2);
    REQUIRE(full.size() == 2);
    CHECK(full[0] == doctest::Approx(60 * kDeg));
    CHECK(full[1] == doctest::Approx(120 * kDeg));
    const auto hemi = parallel_polar_angles(SamplingMode::Hemisphere, 8);
    REQUIRE(hemi.size() == 8);
    CHECK(hemi.front() == doctest::Approx(15 * kDeg));
    CHECK(hemi.back() == doctest::Approx(85 * kDeg));
    CHECK(parallel_polar_angles(SamplingMode::Hemisphere, 1)[0] == doctest::Approx(50 * kDeg));
}

TEST_CASE("symmetric parallels split evenly") {
    SamplingConfig c;
    c.parallels = 2;
    c.candidates = 100;
    const auto views = sample_candidates(c, Vec3::Zero(), 1.0);
    REQUIRE(views.size() == 100);
    int upper = 0;
    for (const auto& v : views) upper += v.polar < std::numbers::pi / 2;
    CHECK(upper == 50);
}

TEST_CASE("largest remainder") {
    CHECK(proportional_counts({1, 1, 1}, 10) == std::vector<int>{4, 3, 3});
    CHECK(proportional_counts({1, 2}, 9) == std::vector<int>{3, 6});
    CHECK(proportional_counts({0.5, 0.5}, 0) == std::vector<int>{0, 0});
}

TEST_CASE("default configuration gives 800 views at radius R looking at the center") {
    SamplingConfig c;
    CHECK(c.candidates == 800);
    const Vec3 center(0.1, -0.2, 0.05);
    for (auto mode : {SamplingMode::FullSphere, SamplingMode::Hemisphere}) {
        c.mode = mode;
        const auto views = sample_candidates(c, center, 0.63);
        REQUIRE(views.size() == 800);
        for (std::size_t i = 0; i < views.size(); ++i) {
            const auto& v = views[i];
            CHECK(v.index == static_cast<int>(i));
            CHECK((v.pose.translation - center).norm() == doctest::Approx(0.63));
            CHECK(v.pose.is_valid());
            CHECK((v.pose.optical_axis() - (center - v.pose.translation).normalized()).norm() < 1e-9);
            if (mode == SamplingMode::Hemisphere) CHECK(v.pose.translation.z() > center.z());
        }
    }
}

TEST_CASE("partitions") {
    CHECK(partition_of(10 * kDeg, 4) == 0);
    CHECK(partition_of(100 * kDeg, 4) == 1);
    CHECK(partition_of(359.9 * kDeg, 4) == 3);
    CHECK(partition_of(200 * kDeg, 1) == 0);

    SamplingConfig c;
    c.candidates = 64;
    c.parallels = 8;
    auto views = sample_candidates(c, Vec3::Zero(), 1.0);
    assign_partitions(views, 1);
    for (const auto& v : views) CHECK(v.partition == 0);
    assign_partitions(views, 4);
    std::vector<int> counts(4, 0);
    for (const auto& v : views) ++counts[v.partition];
    for (int n : counts) CHECK(n > 0);
}

TEST_CASE("make_view geometry") {
    const auto v = make_view(Vec3(1, 1, 1), 0.5, 90 * kDeg, 0, Vec3::UnitZ());
    CHECK((v.pose.translation - Vec3(1.5, 1, 1)).norm() < 1e-12);
    CHECK((v.pose.optical_axis() + Vec3::UnitX()).norm() < 1e-12);
    // Looking straight down still yields a valid frame.
    const auto top = make_view(Vec3::Zero(), 1.0, 0.0, 0.0, Vec3::UnitZ());
    CHECK(top.pose.is_valid());
}

TEST_CASE("mode strings") {
    CHECK(parse_sampling_mode("hemisphere") == SamplingMode::Hemisphere);
    CHECK(parse_sampling_mode("full_sphere") == SamplingMode::FullSphere);
    CHECK_THROWS_AS(parse_sampling_mode("cylinder"), ConfigError);
}
