#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nbv/error.hpp"
#include "nbv/harness.hpp"
#include "nbv/io.hpp"
#include "nbv/log.hpp"
#include "nbv/mesh.hpp"

namespace fs = std::filesystem;

namespace {

// Registers one string-valued flag per configuration key; values are applied
// after any --config file so flags always win.
struct ConfigFlags {
    std::optional<std::string> config_file;
    std::map<std::string, std::string> values;
    bool verbose = false;

    void attach(CLI::App& app, const std::vector<std::string>& skip = {}) {
        app.add_option("--config", config_file, "key=value file (flags override it)")->check(CLI::ExistingFile);
        for (const auto& key : nbv::config_keys()) {
            if (key == "verbose" || std::find(skip.begin(), skip.end(), key) != skip.end()) continue;
            app.add_option_function<std::string>(
                "--" + key, [this, key](const std::string& v) { values[key] = v; }, "sets '" + key + "'");
        }
        app.add_flag("-v,--verbose", verbose, "write per-iteration debug dumps");
    }

    nbv::RunConfig resolve() const {
        nbv::RunConfig config;
        if (config_file) nbv::load_config_file(config, *config_file);
        for (const auto& [k, v] : values) nbv::apply_setting(config, k, v);
        if (verbose) config.verbose = true;
        return config;
    }
};

int cmd_run(const ConfigFlags& flags) {
    const nbv::RunConfig config = flags.resolve();
    if (config.output_dir.empty()) throw nbv::ConfigError("--out is required");
    const auto result = nbv::run(config);
    std::cout << "iterations: " << result.executed_iterations << " of " << config.planner.iterations << '\n'
              << "final coverage: " << result.records.back().coverage << '\n'
              << "records: " << (config.output_dir / "records.csv").string() << '\n';
    return 0;
}

int cmd_summarize(const std::vector<std::string>& dirs, const std::string& out) {
    std::vector<fs::path> paths(dirs.begin(), dirs.end());
    const auto rows = nbv::summarize_dirs(paths);
    if (out.empty() || out == "-") {
        nbv::write_summary_csv(std::cout, rows);
    } else {
        if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
        std::ofstream f(out);
        if (!f) throw nbv::Error("cannot write " + out);
        nbv::write_summary_csv(f, rows);
    }
    return 0;
}

int cmd_bench(const ConfigFlags& flags, int warmup) {
    nbv::RunConfig config = flags.resolve();
    if (!config.output_dir.empty()) fs::create_directories(config.output_dir);
    const auto mesh = nbv::load_run_mesh(config.mesh);
    const auto r = nbv::bench(config, mesh, warmup);
    std::cout << "candidates: " << r.candidates << '\n'
              << "active voxels: " << r.active_voxels << '\n'
              << "ellipsoids: " << r.ellipsoids << '\n'
              << "projection: " << r.projection_seconds << " s\n"
              << "oracle (stride " << r.stride << "): " << r.oracle_seconds << " s\n"
              << "speedup: " << r.speedup() << "x\n"
              << "spearman: " << r.spearman << '\n'
              << "projection top-1 in oracle top 20%: " << (r.top1_in_oracle_top20 ? "yes" : "no") << '\n';
    return 0;
}

int cmd_mesh(const std::string& name, const std::string& out) {
    nbv::save_obj(nbv::make_named_mesh(name), out);
    std::cout << "wrote " << out << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Next-best-view planning with ellipsoidal scene abstraction"};
    app.require_subcommand(1);

    ConfigFlags run_flags;
    auto* run = app.add_subcommand("run", "scan a mesh and write records.csv, final.ply");
    run_flags.attach(*run);

    std::vector<std::string> summarize_dirs;
    std::string summarize_out;
    auto* summarize = app.add_subcommand("summarize", "per-iteration mean/std across run directories");
    summarize->add_option("dirs", summarize_dirs, "run directories containing records.csv")
        ->required()
        ->check(CLI::ExistingDirectory);
    summarize->add_option("-o,--out", summarize_out, "output CSV (default stdout)");

    ConfigFlags bench_flags;
    int warmup = 2;
    auto* bench = app.add_subcommand("bench", "paired projection vs ray-casting timing");
    bench_flags.attach(*bench);
    bench->add_option("--warmup", warmup, "planning iterations before timing")->check(CLI::NonNegativeNumber);

    std::string mesh_name, mesh_out;
    auto* mesh = app.add_subcommand("mesh", "export a built-in mesh as OBJ");
    mesh->add_option("name", mesh_name, "sphere, cube, torus, lblock or stairs")->required();
    mesh->add_option("out", mesh_out, "output .obj")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(run_flags);
        if (*summarize) return cmd_summarize(summarize_dirs, summarize_out);
        if (*bench) return cmd_bench(bench_flags, warmup);
        if (*mesh) return cmd_mesh(mesh_name, mesh_out);
    } catch (const nbv::ConfigError& e) {
        std::cerr << "nbv: configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "nbv: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
