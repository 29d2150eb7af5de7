#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "nbv/mesh.hpp"
#include "nbv/planner.hpp"

namespace nbv {

/// Everything a run needs. Every field has a key=value spelling (see
/// `config_keys()`), shared by config files and command-line flags.
struct RunConfig {
    /// Mesh file path, or "builtin:<name>" for a procedural desk object.
    std::string mesh;
    PlannerConfig planner;
    std::filesystem::path output_dir;
    double coverage_threshold = 0.005;
    std::size_t model_points = 10000;
    bool verbose = false;
};

std::vector<std::string> config_keys();

/// Sets one key; throws ConfigError for unknown keys or malformed values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Reads key=value lines ('#' starts a comment) on top of `config`.
void load_config_file(RunConfig& config, const std::filesystem::path& path);

/// Checks positivity and ranges; throws ConfigError.
void validate(const RunConfig& config);

TriangleMesh load_run_mesh(const std::string& spec);

struct IterationRecord {
    int iteration = 0;
    double coverage = 0;
    double compute_time_s = 0;
    Vec3 position = Vec3::Zero();
    int partition = 0;
    StateCounts counts;
    std::size_t n_eo = 0;
    std::size_t n_ef = 0;
};

inline constexpr const char* kRecordsHeader =
    "iteration,coverage,compute_time_s,pos_x,pos_y,pos_z,partition,n_empty,n_occupied,n_unknown,n_frontier,n_eo,n_ef";

void write_records_csv(std::ostream& out, const std::vector<IterationRecord>& records, bool include_time = true);
std::vector<IterationRecord> read_records_csv(const std::filesystem::path& path);

/// Extends `records` to `target` rows by repeating the last row (compute
/// time 0 for the repeated rows).
std::vector<IterationRecord> pad_records(std::vector<IterationRecord> records, int target);

struct RunResult {
    std::vector<IterationRecord> records;  // padded to the iteration budget
    int executed_iterations = 0;
    double initial_coverage = 0;
    PlannerState final_state;
};

/// Runs the planning loop on `mesh`. When `config.output_dir` is set, writes
/// records.csv, final.ply and (if verbose) per-iteration dumps.
RunResult run(const RunConfig& config, const TriangleMesh& mesh);
RunResult run(const RunConfig& config);

struct SummaryRow {
    int iteration = 0;
    double mean_coverage = 0, std_coverage = 0;
    double mean_time = 0, std_time = 0;
    int runs = 0;
};

/// Per-iteration mean and population standard deviation across runs; shorter
/// runs are padded with their last row to the longest run.
std::vector<SummaryRow> summarize(const std::vector<std::vector<IterationRecord>>& runs);
std::vector<SummaryRow> summarize_dirs(const std::vector<std::filesystem::path>& run_dirs);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

struct BenchResult {
    std::size_t candidates = 0;
    std::size_t active_voxels = 0;
    std::size_t ellipsoids = 0;
    int stride = 4;
    double projection_seconds = 0;
    double oracle_seconds = 0;
    double spearman = 0;
    bool top1_in_oracle_top20 = false;

    double speedup() const { return projection_seconds > 0 ? oracle_seconds / projection_seconds : 0.0; }
};

/// Paired single-threaded timing of projection scoring vs ray-casting on one
/// mid-scan scene
/// (after `warmup_iterations` planning steps).
BenchResult bench(const RunConfig& config, const TriangleMesh& mesh, int warmup_iterations = 2);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// True when the projection-best candidate is within the top `fraction` of
/// the oracle ordering (ties at the cutoff count as inside).
bool top1_within(const std::vector<double>& projection, const std::vector<double>& oracle, double fraction);

}  // namespace nbv
