#include "nbv/planner.hpp"

#include <algorithm>
#include <chrono>
#include <random>

#include "nbv/error.hpp"
#include "nbv/log.hpp"
#include "nbv/oracle.hpp"
#include "nbv/projection_eval.hpp"

namespace nbv {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Box3 workspace_box(const PlannerConfig& c) {
    return {c.initial_center - Vec3::Constant(c.workspace), c.initial_center + Vec3::Constant(c.workspace)};
}

RefitOptions refit_options(const PlannerState& state) {
    RefitOptions o;
    o.max_components = state.config.max_components;
    o.seed = state.config.seed + static_cast<std::uint64_t>(state.iteration);
    return o;
}

void append_cloud(PlannerState& state, const std::vector<Vec3>& points) {
    const double s = state.config.cloud_spacing;
    const Box3 ws = workspace_box(state.config);
    for (const Vec3& p : points) {
        if (!ws.contains(p)) continue;
        const std::array<std::int64_t, 3> key{static_cast<std::int64_t>(std::floor(p.x() / s)),
                                              static_cast<std::int64_t>(std::floor(p.y() / s)),
                                              static_cast<std::int64_t>(std::floor(p.z() / s))};
        if (state.cloud_cells.insert(key).second) state.cloud.push_back(p);
    }
}

/// Renders from `pose` and folds the frame into the map. Returns false when
/// the frame saw nothing inside the workspace.
bool observe(PlannerState& state, const RayCaster& scene, const Posed& pose, bool first_frame, PhaseTimes& times) {
    const auto& cfg = state.config;
    auto t0 = Clock::now();
    const DepthFrame frame =
        render_depth(scene, pose, cfg.intrinsics, cfg.depth_noise, cfg.seed * 1000003ULL + state.iteration);
    const std::vector<Vec3> raw = frame_to_points(frame);
    times.render += seconds_since(t0);

    t0 = Clock::now();
    append_cloud(state, raw);
    Observation obs;
    obs.sensor_origin = pose.translation;
    obs.points = preprocess_points(raw, workspace_box(cfg), cfg.resolution / 2);
    if (obs.points.empty()) {
        times.update += seconds_since(t0);
        if (first_frame) throw EmptyInputError("initial observation contains no points");
        return false;
    }

    VoxelGrid& grid = state.grid;
    integrate_observation(grid, obs);
    if (first_frame) {
        update_bbox(grid, pose.optical_axis(), true, cfg.effective_gamma());
        grid.ensure_contains(grid.bbox());
        // Second pass marks the occluded region now that B exists.
        integrate_observation(grid, obs);
        update_frontier(grid);
    } else {
        update_frontier(grid);
        update_bbox(grid, pose.optical_axis(), false, cfg.effective_gamma());
        if (grid.ensure_contains(grid.bbox())) update_frontier(grid);
    }
    times.update += seconds_since(t0);

    t0 = Clock::now();
    state.ellipsoids = refit_all(grid, refit_options(state));
    times.refit += seconds_since(t0);
    return true;
}

}  // namespace

void PartitionLedger::mark(int iteration, int partition) {
    scanned.insert(partition);
    visit_order.emplace_back(iteration, partition);
}

std::vector<int> admissible_partitions(const PartitionLedger& ledger) {
    std::vector<int> out;
    const int beta = std::max(ledger.beta, 1);
    if (ledger.scanned.empty() || static_cast<int>(ledger.scanned.size()) >= beta) {
        for (int p = 0; p < beta; ++p) out.push_back(p);
        return out;
    }
    for (int p = 0; p < beta; ++p) {
        if (ledger.scanned.count(p)) continue;
        if (ledger.scanned.count((p + 1) % beta) || ledger.scanned.count((p + beta - 1) % beta)) out.push_back(p);
    }
    return out;
}

std::size_t select_next_view(const std::vector<CandidateView>& scored, PartitionLedger& ledger, int iteration) {
    const auto allowed = admissible_partitions(ledger);
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < scored.size(); ++i) {
        const auto& c = scored[i];
        if (!std::binary_search(allowed.begin(), allowed.end(), c.partition)) continue;
        const double s = c.score.value_or(-std::numeric_limits<double>::infinity());
        if (!best) {
            best = i;
            continue;
        }
        const auto& b = scored[*best];
        const double bs = b.score.value_or(-std::numeric_limits<double>::infinity());
        if (s > bs || (s == bs && c.index < b.index)) best = i;
    }
    if (!best) throw ConstraintInfeasibleError("no candidate lies in an admissible partition");
    ledger.mark(iteration, scored[*best].partition);
    return *best;
}

const char* to_string(Evaluator e) {
    switch (e) {
        case Evaluator::Projection: return "projection";
        case Evaluator::Oracle: return "oracle";
        case Evaluator::Random: return "random";
    }
    return "?";
}

Evaluator parse_evaluator(const std::string& s) {
    if (s == "projection") return Evaluator::Projection;
    if (s == "oracle") return Evaluator::Oracle;
    if (s == "random") return Evaluator::Random;
    throw ConfigError("unknown evaluator '" + s + "' (expected projection, oracle or random)");
}

PlannerState initialize_planner(const PlannerConfig& config, const RayCaster& scene) {
    if (!(config.resolution > 0) || config.max_components < 1 || config.beta < 1 || config.iterations < 1)
        throw ConfigError("planner configuration values must be positive");
    PlannerState state;
    state.config = config;
    state.config.sampling.working_distance = config.intrinsics.working_distance;
    state.grid = VoxelGrid::covering(workspace_box(config), config.resolution);
    state.ledger.beta = config.beta;
    state.initial_view = make_view(config.initial_center, config.initial_distance, config.initial_polar,
                                   config.initial_azimuth, config.sampling.up);
    state.initial_view.partition = partition_of(state.initial_view.azimuth, config.beta);
    PhaseTimes times;
    observe(state, scene, state.initial_view.pose, true, times);
    log::debug("initial view: ", state.grid.counts().occupied, " occupied, ", state.ellipsoids.size(), " ellipsoids");
    return state;
}

std::vector<double> score_candidates(const PlannerState& state, const std::vector<CandidateView>& candidates) {
    std::vector<double> scores(candidates.size());
    switch (state.config.evaluator) {
        case Evaluator::Projection: {
            const auto s = evaluate_all(candidates, state.ellipsoids, state.config.intrinsics);
            for (std::size_t i = 0; i < s.size(); ++i) scores[i] = s[i].F;
            break;
        }
        case Evaluator::Oracle: {
            const auto s = oracle_evaluate_all(candidates, state.grid, state.config.intrinsics, state.config.oracle_stride);
            for (std::size_t i = 0; i < s.size(); ++i) scores[i] = double(s[i].visible_frontier);
            break;
        }
        case Evaluator::Random: {
            std::mt19937_64 rng(state.config.seed * 7919ULL + static_cast<std::uint64_t>(state.iteration));
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (double& s : scores) s = u(rng);
            break;
        }
    }
    return scores;
}

IterationReport run_iteration(PlannerState& state, const RayCaster& scene) {
    IterationReport report;
    PhaseTimes& times = report.times;
    const int iteration = state.iteration + 1;

    auto t0 = Clock::now();
    const Box3& bbox = state.grid.bbox();
    auto candidates = sample_candidates(state.config.sampling, bbox.center(),
                                        sampling_radius(bbox, state.config.sampling.working_distance));
    assign_partitions(candidates, state.config.beta);
    times.sampling = seconds_since(t0);

    t0 = Clock::now();
    const auto scores = score_candidates(state, candidates);
    for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i].score = scores[i];
    times.evaluation = seconds_since(t0);

    t0 = Clock::now();
    std::size_t chosen = 0;
    try {
        chosen = select_next_view(candidates, state.ledger, iteration);
    } catch (const ConstraintInfeasibleError&) {
        log::info("iteration ", iteration, ": no admissible candidate, widening to all partitions");
        report.widened = true;
        PartitionLedger open = state.ledger;
        for (int p = 0; p < open.beta; ++p) open.scanned.insert(p);
        chosen = select_next_view(candidates, open, iteration);
        state.ledger.mark(iteration, candidates[chosen].partition);
    }
    times.selection = seconds_since(t0);

    report.chosen = candidates[chosen];
    report.score = *candidates[chosen].score;
    state.iteration = iteration;
    state.history.push_back(report.chosen);

    report.all_miss = !observe(state, scene, report.chosen.pose, false, times);
    if (report.all_miss) log::info("iteration ", iteration, ": chosen view observed nothing");

    state.empty_frontier_streak = state.ellipsoids.frontier.empty() ? state.empty_frontier_streak + 1 : 0;
    state.last_candidates = std::move(candidates);

    report.iteration = iteration;
    report.counts = state.grid.counts();
    report.n_occupied_ellipsoids = state.ellipsoids.occupied.size();
    report.n_frontier_ellipsoids = state.ellipsoids.frontier.size();
    log::debug("iteration ", iteration, ": sampling ", times.sampling, " s, evaluation ", times.evaluation,
               " s, selection ", times.selection, " s, update ", times.update, " s, refit ", times.refit, " s, render ",
               times.render, " s");
    log::debug("iteration ", iteration, ": partition ", report.chosen.partition, " score ", report.score, " |Eo| ",
               report.n_occupied_ellipsoids, " |Ef| ", report.n_frontier_ellipsoids, " compute ", times.compute(), " s");
    return report;
}

bool should_terminate(const PlannerState& state) {
    return state.iteration >= state.config.iterations || state.empty_frontier_streak >= 2;
}

}  // namespace nbv
