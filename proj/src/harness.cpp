#include "nbv/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>

#include "nbv/coverage.hpp"
#include "nbv/error.hpp"
#include "nbv/io.hpp"
#include "nbv/log.hpp"
#include "nbv/oracle.hpp"
#include "nbv/parallel.hpp"
#include "nbv/projection_eval.hpp"

namespace nbv {

namespace {

using Clock = std::chrono::steady_clock;

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
    }
}

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long l = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return l;
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("'" + key + "' expects a boolean, got '" + v + "'");
}

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"mesh", [](RunConfig& c, const std::string&, const std::string& v) { c.mesh = v; }},
        {"out", [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
        {"mode",
         [](RunConfig& c, const std::string&, const std::string& v) { c.planner.sampling.mode = parse_sampling_mode(v); }},
        {"resolution",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.planner.resolution = to_double(k, v); }},
        {"t-max",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.planner.max_components = int(to_long(k, v)); }},
        {"beta", [](RunConfig& c, const std::string& k, const std::string& v) { c.planner.beta = int(to_long(k, v)); }},
        {"alpha",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.planner.sampling.parallels = int(to_long(k, v)); }},
        {"candidates",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.planner.sampling.candidates = int(to_long(k, v)); }},
        {"working-distance",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.planner.intrinsics.working_distance = to_double(k, v);
         }},
        {"gamma", [](RunConfig& c, const std::string& k, const std::string& v) { c.planner.gamma = to_double(k, v); }},
        {"iterations",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.planner.iterations = int(to_long(k, v)); }},
        {"seed",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.planner.seed = static_cast<std::uint64_t>(to_long(k, v));
         }},
        {"evaluator",
         [](RunConfig& c, const std::string&, const std::string& v) { c.planner.evaluator = parse_evaluator(v); }},
        {"stride",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.planner.oracle_stride = int(to_long(k, v)); }},
        {"init-distance",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.planner.initial_distance = to_double(k, v); }},
        {"init-polar",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.planner.initial_polar = deg2rad(to_double(k, v));
         }},
        {"init-azimuth",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.planner.initial_azimuth = deg2rad(to_double(k, v));
         }},
        {"workspace",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.planner.workspace = to_double(k, v); }},
        {"noise",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.planner.depth_noise = to_double(k, v); }},
        {"threshold",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.coverage_threshold = to_double(k, v); }},
        {"model-points",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.model_points = static_cast<std::size_t>(to_long(k, v));
         }},
        {"verbose", [](RunConfig& c, const std::string& k, const std::string& v) { c.verbose = to_bool(k, v); }},
        {"fx", [](RunConfig& c, const std::string& k, const std::string& v) { c.planner.intrinsics.fx = to_double(k, v); }},
        {"fy", [](RunConfig& c, const std::string& k, const std::string& v) { c.planner.intrinsics.fy = to_double(k, v); }},
        {"cx", [](RunConfig& c, const std::string& k, const std::string& v) { c.planner.intrinsics.cx = to_double(k, v); }},
        {"cy", [](RunConfig& c, const std::string& k, const std::string& v) { c.planner.intrinsics.cy = to_double(k, v); }},
        {"width",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.planner.intrinsics.width = int(to_long(k, v)); }},
        {"height",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.planner.intrinsics.height = int(to_long(k, v)); }},
        {"max-range",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.planner.intrinsics.max_range = to_double(k, v); }},
    };
    return table;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::string format_row(const IterationRecord& r, bool include_time) {
    std::ostringstream os;
    os.precision(9);
    os << r.iteration << ',' << r.coverage << ',';
    if (include_time) os << r.compute_time_s;
    os << ',' << r.position.x() << ',' << r.position.y() << ',' << r.position.z() << ',' << r.partition << ','
       << r.counts.empty << ',' << r.counts.occupied << ',' << r.counts.unknown << ',' << r.counts.frontier << ','
       << r.n_eo << ',' << r.n_ef;
    return os.str();
}

std::vector<double> average_ranks(const std::vector<double>& x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> rank(x.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = 0.5 * double(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = avg;
        i = j + 1;
    }
    return rank;
}

}  // namespace

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& [k, _] : setters()) keys.push_back(k);
    return keys;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown configuration key '" + key + "'");
    it->second(config, key, value);
}

void load_config_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(raw.substr(0, raw.find('#')));
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line) + ": expected key=value");
        try {
            apply_setting(config, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(path.string() + ":" + std::to_string(line) + ": " + e.what());
        }
    }
}

void validate(const RunConfig& c) {
    const auto& p = c.planner;
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(what);
    };
    require(!c.mesh.empty(), "mesh is required");
    require(p.resolution > 0, "resolution must be positive");
    require(p.max_components >= 1, "t-max must be >= 1");
    require(p.beta >= 1, "beta must be >= 1");
    require(p.sampling.parallels >= 1, "alpha must be >= 1");
    require(p.sampling.candidates >= p.sampling.parallels, "candidates must be >= alpha");
    require(p.intrinsics.working_distance > 0, "working-distance must be positive");
    require(p.gamma >= 0, "gamma must be non-negative (0 selects 2 x resolution)");
    require(p.iterations >= 1, "iterations must be >= 1");
    require(p.oracle_stride >= 1, "stride must be >= 1");
    require(p.initial_distance > 0, "init-distance must be positive");
    require(p.workspace > 0, "workspace must be positive");
    require(p.depth_noise >= 0, "noise must be non-negative");
    require(c.coverage_threshold > 0, "threshold must be positive");
    require(c.model_points > 0, "model-points must be positive");
    require(p.intrinsics.is_valid(), "camera intrinsics are invalid");
}

TriangleMesh load_run_mesh(const std::string& spec) {
    const std::string prefix = "builtin:";
    if (spec.rfind(prefix, 0) == 0) return make_named_mesh(spec.substr(prefix.size()));
    return load_mesh(spec);
}

void write_records_csv(std::ostream& out, const std::vector<IterationRecord>& records, bool include_time) {
    out << kRecordsHeader << '\n';
    for (const auto& r : records) out << format_row(r, include_time) << '\n';
}

std::vector<IterationRecord> read_records_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || trim(line) != kRecordsHeader)
        throw FormatError(path.string() + ": line 1: unexpected records header");
    std::vector<IterationRecord> out;
    int n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string tok; std::getline(ss, tok, ',');) f.push_back(tok);
        if (f.size() != 13) throw FormatError(path.string() + ": line " + std::to_string(n) + ": expected 13 fields");
        try {
            IterationRecord r;
            r.iteration = std::stoi(f[0]);
            r.coverage = std::stod(f[1]);
            r.compute_time_s = f[2].empty() ? 0.0 : std::stod(f[2]);
            r.position = {std::stod(f[3]), std::stod(f[4]), std::stod(f[5])};
            r.partition = std::stoi(f[6]);
            r.counts.empty = std::stoul(f[7]);
            r.counts.occupied = std::stoul(f[8]);
            r.counts.unknown = std::stoul(f[9]);
            r.counts.frontier = std::stoul(f[10]);
            r.n_eo = std::stoul(f[11]);
            r.n_ef = std::stoul(f[12]);
            out.push_back(r);
        } catch (const std::exception&) {
            throw FormatError(path.string() + ": line " + std::to_string(n) + ": malformed field");
        }
    }
    return out;
}

std::vector<IterationRecord> pad_records(std::vector<IterationRecord> records, int target) {
    if (records.empty()) return records;
    while (static_cast<int>(records.size()) < target) {
        IterationRecord r = records.back();
        r.iteration += 1;
        r.compute_time_s = 0;
        records.push_back(r);
    }
    return records;
}

RunResult run(const RunConfig& config, const TriangleMesh& mesh) {
    validate(config);
    const RayCaster scene(mesh);
    const auto model = sample_surface(mesh, config.model_points, config.planner.seed);
    const bool dump = config.verbose && !config.output_dir.empty();
    if (!config.output_dir.empty()) std::filesystem::create_directories(config.output_dir);

    RunResult result;
    PlannerState state = initialize_planner(config.planner, scene);
    result.initial_coverage = coverage(model, state.cloud, config.coverage_threshold);
    log::info("initial coverage ", result.initial_coverage);

    while (!should_terminate(state)) {
        const IterationReport rep = run_iteration(state, scene);
        IterationRecord rec;
        rec.iteration = rep.iteration;
        rec.coverage = coverage(model, state.cloud, config.coverage_threshold);
        rec.compute_time_s = rep.times.compute();
        rec.position = rep.chosen.pose.translation;
        rec.partition = rep.chosen.partition;
        rec.counts = rep.counts;
        rec.n_eo = rep.n_occupied_ellipsoids;
        rec.n_ef = rep.n_frontier_ellipsoids;
        result.records.push_back(rec);
        log::info("iteration ", rec.iteration, ": coverage ", rec.coverage, ", compute ", rec.compute_time_s,
                  " s, partition ", rec.partition, ", |Eo| ", rec.n_eo, ", |Ef| ", rec.n_ef);
        if (dump) {
            char name[32];
            std::snprintf(name, sizeof name, "iter_%02d", rec.iteration);
            const auto dir = config.output_dir / name;
            write_voxel_ply(dir / "voxels.ply", state.grid);
            write_ellipsoids(dir / "ellipsoids.txt", state.ellipsoids);
            write_candidates_csv(dir / "candidates.csv", state.last_candidates);
            write_scores_csv(dir / "scores.csv",
                             evaluate_all(state.last_candidates, state.ellipsoids, state.config.intrinsics));
        }
    }
    result.executed_iterations = state.iteration;
    if (state.iteration < config.planner.iterations)
        log::info("terminated early after ", state.iteration, " iterations (no frontier left)");
    result.records = pad_records(std::move(result.records), config.planner.iterations);

    if (!config.output_dir.empty()) {
        std::ofstream out(config.output_dir / "records.csv");
        if (!out) throw Error("cannot write records.csv in " + config.output_dir.string());
        write_records_csv(out, result.records);
        write_cloud_ply(config.output_dir / "final.ply", state.cloud);
    }
    result.final_state = std::move(state);
    return result;
}

RunResult run(const RunConfig& config) { return run(config, load_run_mesh(config.mesh)); }

std::vector<SummaryRow> summarize(const std::vector<std::vector<IterationRecord>>& runs) {
    if (runs.empty()) throw EmptyInputError("summarize needs at least one run");
    std::size_t longest = 0;
    for (const auto& r : runs) longest = std::max(longest, r.size());
    std::vector<std::vector<IterationRecord>> padded;
    for (const auto& r : runs) {
        if (r.empty()) throw EmptyInputError("run without records");
        padded.push_back(pad_records(r, static_cast<int>(longest)));
    }
    std::vector<SummaryRow> rows;
    for (std::size_t i = 0; i < longest; ++i) {
        SummaryRow row;
        row.iteration = static_cast<int>(i) + 1;
        row.runs = static_cast<int>(padded.size());
        for (const auto& r : padded) {
            row.mean_coverage += r[i].coverage;
            row.mean_time += r[i].compute_time_s;
        }
        row.mean_coverage /= row.runs;
        row.mean_time /= row.runs;
        for (const auto& r : padded) {
            row.std_coverage += std::pow(r[i].coverage - row.mean_coverage, 2);
            row.std_time += std::pow(r[i].compute_time_s - row.mean_time, 2);
        }
        row.std_coverage = std::sqrt(row.std_coverage / row.runs);
        row.std_time = std::sqrt(row.std_time / row.runs);
        rows.push_back(row);
    }
    return rows;
}

std::vector<SummaryRow> summarize_dirs(const std::vector<std::filesystem::path>& run_dirs) {
    std::vector<std::vector<IterationRecord>> runs(run_dirs.size());
    const auto n = static_cast<long>(run_dirs.size());
    ExceptionSlot slot;
#pragma omp parallel for
    for (long i = 0; i < n; ++i) slot.run([&] { runs[i] = read_records_csv(run_dirs[i] / "records.csv"); });
    slot.rethrow();
    return summarize(runs);
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out.precision(9);
    out << "iteration,mean_coverage,std_coverage,mean_compute_time_s,std_compute_time_s,runs\n";
    for (const auto& r : rows)
        out << r.iteration << ',' << r.mean_coverage << ',' << r.std_coverage << ',' << r.mean_time << ','
            << r.std_time << ',' << r.runs << '\n';
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) return 0.0;
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    const double n = double(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0 || sbb == 0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

bool top1_within(const std::vector<double>& projection, const std::vector<double>& oracle, double fraction) {
    if (projection.empty() || projection.size() != oracle.size()) return false;
    const auto best = static_cast<std::size_t>(
        std::max_element(projection.begin(), projection.end()) - projection.begin());
    // Number of candidates the oracle strictly prefers.
    const auto better = std::count_if(oracle.begin(), oracle.end(), [&](double o) { return o > oracle[best]; });
    const auto cutoff = static_cast<long>(std::ceil(fraction * double(oracle.size())));
    return better < cutoff;
}

BenchResult bench(const RunConfig& config, const TriangleMesh& mesh, int warmup_iterations) {
    validate(config);
    const RayCaster scene(mesh);
    RunConfig cfg = config;
    cfg.planner.evaluator = Evaluator::Projection;
    PlannerState state = initialize_planner(cfg.planner, scene);
    for (int i = 0; i < warmup_iterations && !should_terminate(state); ++i) run_iteration(state, scene);

    const Box3& bbox = state.grid.bbox();
    auto candidates = sample_candidates(state.config.sampling, bbox.center(),
                                        sampling_radius(bbox, state.config.sampling.working_distance));
    assign_partitions(candidates, state.config.beta);

    BenchResult result;
    result.candidates = candidates.size();
    result.active_voxels = state.grid.counts().active();
    result.ellipsoids = state.ellipsoids.size();
    result.stride = cfg.planner.oracle_stride;

    // Both evaluators run single-threaded so the timing is paired.
    std::vector<ViewScore> proj(candidates.size());
    auto t0 = Clock::now();
    for (std::size_t i = 0; i < candidates.size(); ++i)
        proj[i] = evaluate_view(candidates[i], state.ellipsoids, state.config.intrinsics);
    result.projection_seconds = std::chrono::duration<double>(Clock::now() - t0).count();

    std::vector<OracleScore> oracle(candidates.size());
    std::vector<double> per_candidate(candidates.size());
    t0 = Clock::now();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto c0 = Clock::now();
        oracle[i] = oracle_evaluate(candidates[i], state.grid, state.config.intrinsics, result.stride);
        per_candidate[i] = std::chrono::duration<double>(Clock::now() - c0).count();
    }
    result.oracle_seconds = std::chrono::duration<double>(Clock::now() - t0).count();

    std::vector<double> f(proj.size()), o(oracle.size());
    for (std::size_t i = 0; i < proj.size(); ++i) {
        f[i] = proj[i].F;
        o[i] = double(oracle[i].visible_frontier);
    }
    result.spearman = spearman(f, o);
    result.top1_in_oracle_top20 = top1_within(f, o, 0.2);

    if (!config.output_dir.empty()) {
        write_oracle_csv(config.output_dir / "bench_oracle.csv", oracle, per_candidate);
        write_scores_csv(config.output_dir / "bench_projection.csv", proj);
    }
    return result;
}

}  // namespace nbv
