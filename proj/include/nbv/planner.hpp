#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <unordered_set>
#include <array>
#include <string>
#include <vector>

#include "nbv/ellipsoid_fit.hpp"
#include "nbv/render.hpp"
#include "nbv/view_sampling.hpp"
#include "nbv/voxel_grid.hpp"

namespace nbv {

struct CellKeyHash {
    std::size_t operator()(const std::array<std::int64_t, 3>& k) const {
        return static_cast<std::size_t>(k[0] * 73856093 ^ k[1] * 19349663 ^ k[2] * 83492791);
    }
};

struct PartitionLedger {
    int beta = 4;
    std::set<int> scanned;
    std::vector<std::pair<int, int>> visit_order;  // (iteration, partition)

    void mark(int iteration, int partition);
};

/// Partitions the next view may come from: everything on the first call or
/// once all are scanned, otherwise the unscanned sectors adjacent (mod beta)
/// to a scanned one.
std::vector<int> admissible_partitions(const PartitionLedger& ledger);

/// Position in `scored` of the highest-score candidate among admissible
/// partitions (ties: lower candidate index). Marks the winner's partition as
/// scanned at `iteration`. Throws ConstraintInfeasibleError when no candidate
/// is admissible; the ledger is left untouched in that case.
std::size_t select_next_view(const std::vector<CandidateView>& scored, PartitionLedger& ledger, int iteration);

enum class Evaluator { Projection, Oracle, Random };

const char* to_string(Evaluator e);
Evaluator parse_evaluator(const std::string& s);

struct PlannerConfig {
    double resolution = 0.03;
    int max_components = 10;  // T_max
    int beta = 4;
    SamplingConfig sampling;
    double gamma = 0;  // <= 0 means 2 * resolution
    int iterations = 10;
    std::uint64_t seed = 7;
    Evaluator evaluator = Evaluator::Projection;
    int oracle_stride = 4;
    CameraIntrinsics intrinsics;
    Vec3 initial_center = Vec3::Zero();
    double initial_distance = 0.7;
    double initial_polar = 1.0471975511965976;  // 60 deg
    double initial_azimuth = 0;
    /// Points outside this cube (half-extent, around initial_center) are cropped.
    double workspace = 0.5;
    /// Spacing of the accumulated cloud P_f.
    double cloud_spacing = 0.001;
    double depth_noise = 0;

    double effective_gamma() const { return gamma > 0 ? gamma : 2 * resolution; }
};

struct PhaseTimes {
    double sampling = 0, evaluation = 0, selection = 0;  // viewpoint selection
    double update = 0, refit = 0;                        // scene representation
    double render = 0;                                    // simulator only

    double compute() const { return sampling + evaluation + selection + update + refit; }
};

struct PlannerState {
    PlannerConfig config;
    int iteration = 0;
    VoxelGrid grid;
    EllipsoidSet ellipsoids;
    std::vector<Vec3> cloud;  // P_f
    PartitionLedger ledger;
    std::vector<CandidateView> history;
    CandidateView initial_view;
    int empty_frontier_streak = 0;
    /// Occupied cells of size cloud_spacing, for deduplicating P_f.
    std::unordered_set<std::array<std::int64_t, 3>, CellKeyHash> cloud_cells;

    // Last iteration's candidate set and scores, kept for debug dumps.
    std::vector<CandidateView> last_candidates;
};

struct IterationReport {
    int iteration = 0;
    CandidateView chosen;
    double score = 0;
    bool widened = false;   // partition constraint was infeasible
    bool all_miss = false;  // chosen view saw nothing
    StateCounts counts;
    std::size_t n_occupied_ellipsoids = 0;
    std::size_t n_frontier_ellipsoids = 0;
    PhaseTimes times;
};

/// Renders the preset initial view, integrates it and fits the first
/// ellipsoids. Throws EmptyInputError when the initial view sees nothing.
PlannerState initialize_planner(const PlannerConfig& config, const RayCaster& scene);

/// One planning step: sample, score, select, observe, update, refit.
IterationReport run_iteration(PlannerState& state, const RayCaster& scene);

/// Budget reached, or no frontier ellipsoid for two consecutive iterations.
bool should_terminate(const PlannerState& state);

/// Scores for the configured evaluator, one per candidate.
std::vector<double> score_candidates(const PlannerState& state, const std::vector<CandidateView>& candidates);

}  // namespace nbv
