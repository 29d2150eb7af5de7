#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nbv/coverage.hpp"
#include "nbv/error.hpp"
#include "nbv/harness.hpp"
#include "nbv/render.hpp"
#include "oracles.hpp"

using namespace nbv;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nbv_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::vector<IterationRecord> coverage_run(const std::vector<double>& coverages, double time = 1.0) {
    std::vector<IterationRecord> out;
    for (std::size_t i = 0; i < coverages.size(); ++i) {
        IterationRecord r;
        r.iteration = static_cast<int>(i) + 1;
        r.coverage = coverages[i];
        r.compute_time_s = time;
        out.push_back(r);
    }
    return out;
}

}  // namespace

TEST_CASE("coverage basics") {
    const std::vector<Vec3> model = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
    CHECK(coverage(model, model) == 1.0);
    const std::vector<Vec3> near_one = {Vec3(0.004, 0, 0)};
    CHECK(coverage(model, near_one, 0.005) == 0.5);
    CHECK(coverage(model, std::vector<Vec3>{}, 0.005) == 0.0);
}

TEST_CASE("coverage agrees with brute force") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    std::vector<Vec3> model, acquired;
    for (int i = 0; i < 600; ++i) model.emplace_back(u(rng), u(rng), u(rng));
    for (int i = 0; i < 3000; ++i) acquired.emplace_back(u(rng), u(rng), u(rng));
    CHECK(coverage(model, acquired, 0.01) == nbv::testing::brute_coverage(model, acquired, 0.01));
}

TEST_CASE("surface samples lie on the mesh") {
    const TriangleMesh m = make_named_mesh("torus");
    const auto pts = sample_surface(m, 500, 3);
    REQUIRE(pts.size() == 500);
    for (const Vec3& p : pts) {
        double best = 1e9;
        for (const auto& t : m.triangles)
            best = std::min(best, nbv::testing::point_triangle_distance(p, m.vertices[t[0]], m.vertices[t[1]],
                                                                         m.vertices[t[2]]));
        CHECK(best < 1e-12);
    }
    CHECK(sample_surface(m, 500, 3) == pts);
}

TEST_CASE("single view of a sphere covers the visible cap") {
    const double r = 0.1, d = 0.6;
    const RayCaster scene(make_uv_sphere(Vec3::Zero(), r, 96, 192));
    const auto model = sample_surface(scene.mesh(), 10000, 9);
    const auto pts = frame_to_points(render_depth(scene, look_at<double>(Vec3(d, 0, 0), Vec3::Zero(), Vec3::UnitZ()),
                                                  CameraIntrinsics{}));
    const double cap = (1 - r / d) / 2;
    CHECK(coverage(model, pts, 0.005) == doctest::Approx(cap).epsilon(0.02 / cap));
}

TEST_CASE("config keys and files") {
    RunConfig c;
    apply_setting(c, "mesh", "builtin:torus");
    apply_setting(c, "mode", "hemisphere");
    apply_setting(c, "t-max", "20");
    apply_setting(c, "init-polar", "90");
    apply_setting(c, "evaluator", "oracle");
    CHECK(c.mesh == "builtin:torus");
    CHECK(c.planner.sampling.mode == SamplingMode::Hemisphere);
    CHECK(c.planner.max_components == 20);
    CHECK(c.planner.initial_polar == doctest::Approx(std::numbers::pi / 2));
    CHECK(c.planner.evaluator == Evaluator::Oracle);
    CHECK_THROWS_AS(apply_setting(c, "sharpness", "3"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "beta", "four"), ConfigError);
    for (const auto& k : config_keys()) CHECK_FALSE(k.empty());

    const fs::path dir = scratch("config");
    {
        std::ofstream out(dir / "ok.cfg");
        out << "# comment\nmesh = builtin:cube\nbeta=2\n\niterations = 4 # trailing\n";
        std::ofstream bad(dir / "bad.cfg");
        bad << "mesh = builtin:cube\nno equals sign\n";
    }
    RunConfig f;
    load_config_file(f, dir / "ok.cfg");
    CHECK(f.mesh == "builtin:cube");
    CHECK(f.planner.beta == 2);
    CHECK(f.planner.iterations == 4);
    try {
        load_config_file(f, dir / "bad.cfg");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }

    RunConfig v;
    v.mesh = "builtin:cube";
    CHECK_NOTHROW(validate(v));
    v.planner.resolution = -1;
    CHECK_THROWS_AS(validate(v), ConfigError);
    CHECK_THROWS_AS(load_run_mesh("builtin:teapot"), Error);
}

TEST_CASE("records round trip and padding") {
    auto recs = coverage_run({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7});
    recs[6].partition = 2;
    recs[6].n_ef = 3;
    const auto padded = pad_records(recs, 10);
    REQUIRE(padded.size() == 10);
    for (int i = 7; i < 10; ++i) {
        CHECK(padded[i].iteration == i + 1);
        CHECK(padded[i].coverage == 0.7);
        CHECK(padded[i].partition == 2);
        CHECK(padded[i].compute_time_s == 0);
    }
    const fs::path dir = scratch("records");
    {
        std::ofstream out(dir / "records.csv");
        write_records_csv(out, padded);
    }
    const auto back = read_records_csv(dir / "records.csv");
    REQUIRE(back.size() == 10);
    CHECK(back[6].coverage == 0.7);
    CHECK(back[6].n_ef == 3);
    {
        std::ofstream out(dir / "broken.csv");
        out << kRecordsHeader << "\n1,0.5,0.1\n";
    }
    CHECK_THROWS_AS(read_records_csv(dir / "broken.csv"), FormatError);

    std::ostringstream no_time;
    write_records_csv(no_time, recs, false);
    CHECK(no_time.str().find("\n1,0.1,,") != std::string::npos);
}

TEST_CASE("summaries") {
    const auto one = coverage_run({0.2, 0.5, 0.9}, 2.0);
    const auto s1 = summarize({one});
    REQUIRE(s1.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(s1[i].mean_coverage == one[i].coverage);
        CHECK(s1[i].std_coverage == 0);
        CHECK(s1[i].mean_time == 2.0);
        CHECK(s1[i].runs == 1);
    }
    const auto s2 = summarize({coverage_run({0.1, 0.2, 0.4}), coverage_run({0.1, 0.3, 0.6})});
    CHECK(s2[2].mean_coverage == doctest::Approx(0.5));
    CHECK(s2[2].std_coverage == doctest::Approx(0.1));

    const auto padded = summarize({coverage_run({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}),
                                   coverage_run({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0})});
    REQUIRE(padded.size() == 10);
    CHECK(padded[9].mean_coverage == doctest::Approx((0.7 + 1.0) / 2));
    CHECK(padded[7].mean_coverage == doctest::Approx((0.7 + 0.8) / 2));
    CHECK_THROWS(summarize({}));

    std::ostringstream os;
    write_summary_csv(os, s1);
    CHECK(os.str().find("mean_coverage") != std::string::npos);
}

TEST_CASE("rank statistics") {
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman({1, 1, 2}, {1, 1, 2}) == doctest::Approx(1.0));
    const std::vector<double> oracle = {10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
    CHECK(top1_within({0, 5, 0, 0, 0, 0, 0, 0, 0, 0}, oracle, 0.2));
    CHECK_FALSE(top1_within({0, 0, 5, 0, 0, 0, 0, 0, 0, 0}, oracle, 0.2));
    CHECK(top1_within({0, 0, 5, 0, 0, 0, 0, 0, 0, 0}, {10, 8, 8, 7, 6, 5, 4, 3, 2, 1}, 0.2));
}

TEST_CASE("end-to-end run writes its artifacts") {
    RunConfig c;
    c.mesh = "builtin:sphere";
    c.planner.sampling.candidates = 150;
    c.planner.iterations = 4;
    c.model_points = 2000;
    c.output_dir = scratch("run");
    c.verbose = true;
    const RunResult r = run(c);
    REQUIRE(r.records.size() == 4);
    CHECK(r.records.back().coverage >= r.records.front().coverage);
    for (std::size_t i = 1; i < r.records.size(); ++i) CHECK(r.records[i].coverage >= r.records[i - 1].coverage);
    CHECK(fs::exists(c.output_dir / "records.csv"));
    CHECK(fs::exists(c.output_dir / "final.ply"));
    CHECK(fs::exists(c.output_dir / "iter_01" / "ellipsoids.txt"));
    CHECK(read_records_csv(c.output_dir / "records.csv").size() == 4);
    CHECK(summarize_dirs({c.output_dir}).size() == 4);

    SUBCASE("random evaluator regression") {
        RunConfig a = c;
        a.planner.evaluator = Evaluator::Random;
        a.verbose = false;
        a.output_dir.clear();
        std::ostringstream x, y;
        write_records_csv(x, run(a).records, false);
        write_records_csv(y, run(a).records, false);
        CHECK(x.str() == y.str());
    }
}

TEST_CASE("projection evaluation is cheaper than the oracle") {
    RunConfig c;
    c.mesh = "builtin:lblock";
    c.planner.iterations = 2;
    c.model_points = 1000;
    RunConfig o = c;
    o.planner.evaluator = Evaluator::Oracle;
    auto total = [](const RunResult& r) {
        double t = 0;
        for (const auto& rec : r.records) t += rec.compute_time_s;
        return t;
    };
    CHECK(total(run(c)) < total(run(o)));
}
