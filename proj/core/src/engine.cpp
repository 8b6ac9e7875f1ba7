#include "covsim/engine.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <thread>

#include "covsim/errors.hpp"

namespace covsim {

std::vector<CellMoment> SwarmState::centroids() const {
    std::vector<CellMoment> out;
    out.reserve(moments.size());
    for (const CellQuadrature& q : moments) out.push_back(q.moment());
    return out;
}

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::running: return "running";
        case StopReason::all_detect: return "all_detect";
        case StopReason::t_max: return "t_max";
    }
    return "unknown";
}

double RunResult::min_distance_overall() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& [t, d] : min_dist_history) m = std::min(m, d);
    return m;
}

std::vector<Point> formation_grid(int rows, int cols, double spacing, Point origin) {
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            pts.push_back({origin.x + c * spacing, origin.y + r * spacing});
        }
    }
    return pts;
}

std::vector<Point> formation_triangle(int rows, double spacing, Point origin) {
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(rows) * (rows + 1) / 2);
    const double pitch = spacing * std::sqrt(3.0) / 2.0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c <= r; ++c) {
            pts.push_back({origin.x + (c - r / 2.0) * spacing, origin.y - r * pitch});
        }
    }
    return pts;
}

std::vector<Point> formation_points(const Formation& formation, int count) {
    std::vector<Point> pts;
    switch (formation.kind) {
        case Formation::Kind::grid:
            pts = formation_grid(formation.rows, formation.cols, formation.spacing,
                                 formation.origin);
            break;
        case Formation::Kind::triangle:
            pts = formation_triangle(formation.rows, formation.spacing, formation.origin);
            break;
        case Formation::Kind::explicit_points:
            pts = formation.points;
            break;
    }
    if (static_cast<int>(pts.size()) != count) {
        throw ValidationError("formation", "produces " + std::to_string(pts.size()) +
                                               " points but count is " + std::to_string(count));
    }
    return pts;
}

namespace {

void apply_latch(DetectionState& det, const DetectionState& previous) {
    if (previous.flags.size() != det.flags.size()) return;
    for (std::size_t i = 0; i < det.flags.size(); ++i) {
        if (previous.flags[i] && !det.flags[i]) {
            det.flags[i] = 1;
            det.detected_regions[i] = previous.detected_regions[i];
        }
    }
}

void compute_moments(const std::vector<VoronoiCell>& cells, const DensityField& field,
                     int resolution, std::vector<CellQuadrature>& out) {
    const std::size_t n = cells.size();
    out.assign(n, CellQuadrature{});
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = std::min<std::size_t>(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = integrate_cell(cells[i], field, resolution);
        return;
    }
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&]() {
        try {
            for (std::size_t i; (i = cursor.fetch_add(1)) < n;) {
                out[i] = integrate_cell(cells[i], field, resolution);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(body);
    body();
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Stages 1-4 of the pipeline for a position set. `latch_base` carries the
// previous detection when latching is enabled.
void evaluate_pipeline(const std::vector<Point>& positions, const ScenarioConfig& config,
                       const DetectionState* latch_base, SwarmState& state) {
    state.detection = update_detection(positions, config.sensor, config.targets);
    if (config.latch_detection && latch_base != nullptr) {
        apply_latch(state.detection, *latch_base);
    }
    state.field = build_density(state.detection, positions, config.density, config.targets);
    state.cells = voronoi_tessellation(positions, config.workspace);
    compute_moments(state.cells, state.field, config.resolution, state.moments);
}

bool pipeline_cached(const SwarmState& state) {
    const std::size_t n = state.positions.size();
    return state.detection.flags.size() == n && state.cells.size() == n &&
           state.moments.size() == n;
}

void validate_config(const ScenarioConfig& config) {
    if (config.agent_count < 1) throw ValidationError("count", "must be at least 1");
    if (!(config.dt > 0.0)) throw ValidationError("dt", "must be positive");
    if (!(config.t_max > 0.0)) throw ValidationError("t_max", "must be positive");
    if (config.resolution < 16) throw ValidationError("resolution", "must be at least 16");
    if (!(config.workspace.min_corner.x < config.workspace.max_corner.x &&
          config.workspace.min_corner.y < config.workspace.max_corner.y)) {
        throw ValidationError("workspace", "min corner must be strictly below max corner");
    }
    for (const TargetRegion& t : config.targets) {
        if (!(t.min_corner.x < t.max_corner.x && t.min_corner.y < t.max_corner.y)) {
            throw ValidationError("targets", "target " + std::to_string(t.id) +
                                                 " has non-positive extent");
        }
        if (!config.workspace.contains(t.min_corner) ||
            !config.workspace.contains(t.max_corner)) {
            throw ValidationError("targets", "target " + std::to_string(t.id) +
                                                 " extends outside the workspace");
        }
    }
}

}  // namespace

SwarmState make_initial_state(const ScenarioConfig& config) {
    validate_config(config);
    std::vector<Point> pts = formation_points(config.formation, config.agent_count);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!is_finite(pts[i])) throw ValidationError("formation", "non-finite point");
        if (!config.workspace.contains(pts[i])) {
            throw ValidationError("formation",
                                  "point " + std::to_string(i) + " lies outside the workspace");
        }
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if (distance(pts[i], pts[j]) < config.d_min) {
                throw ValidationError("formation", "points " + std::to_string(i) + " and " +
                                                       std::to_string(j) +
                                                       " start closer than d_min");
            }
        }
    }
    SwarmState state;
    state.time = 0.0;
    state.positions = std::move(pts);
    state.last_inputs.assign(state.positions.size(), ControlInput{});
    evaluate_pipeline(state.positions, config, nullptr, state);
    return state;
}

SwarmState step(const SwarmState& state, const ScenarioConfig& config) {
    const std::size_t n = state.positions.size();

    // Stages 1-4 at the entry positions; prior states computed them already.
    SwarmState entry;
    const SwarmState* cur = &state;
    if (!pipeline_cached(state)) {
        entry.positions = state.positions;
        evaluate_pipeline(entry.positions, config,
                          state.detection.flags.size() == n ? &state.detection : nullptr, entry);
        entry.time = state.time;
        entry.last_inputs = state.last_inputs;
        cur = &entry;
    }

    // Stage 5: nominal inputs toward the density-weighted centroids.
    std::vector<ControlInput> nominal(n);
    for (std::size_t i = 0; i < n; ++i) {
        nominal[i] =
            nominal_control(cur->positions[i], cur->moments[i].moment().centroid, config.gain_k);
    }

    // Stage 6: joint safety program.
    const std::vector<SafetyConstraint> rows =
        assemble_constraints(cur->positions, config.safety_params());
    QpOptions opts;
    opts.u_max = config.u_max;
    opts.warm_start = cur->qp_active_set;
    opts.retreat_hint = cur->positions;
    const QpSolution qp = solve_safety_qp(nominal, rows, opts);

    // Stage 7: explicit Euler, clamped to the workspace.
    SwarmState next;
    next.time = cur->time + config.dt;
    next.positions.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point moved = {cur->positions[i].x + config.dt * qp.inputs[i].ux,
                             cur->positions[i].y + config.dt * qp.inputs[i].uy};
        next.positions[i] = config.workspace.clamp(moved);
    }
    next.last_inputs = qp.inputs;
    next.qp_active_set = qp.active_set;
    evaluate_pipeline(next.positions, config, &cur->detection, next);
    return next;
}

StopReason check_termination(const SwarmState& state, const ScenarioConfig& config) {
    if (state.detection.all_detected()) return StopReason::all_detect;
    if (state.time >= config.t_max) return StopReason::t_max;
    return StopReason::running;
}

namespace {

// Round-trips a coordinate through the trajectory-file representation.
double quantize_coord(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    return std::strtod(buf, nullptr);
}

double recorded_min_distance(const std::vector<Point>& positions) {
    const std::size_t n = positions.size();
    if (n < 2) return std::numeric_limits<double>::infinity();
    std::vector<Point> q(n);
    for (std::size_t i = 0; i < n; ++i) {
        q[i] = {quantize_coord(positions[i].x), quantize_coord(positions[i].y)};
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            best = std::min(best, distance(q[i], q[j]));
        }
    }
    return best;
}

double cost_of_state(const SwarmState& state) {
    double total = 0.0;
    for (std::size_t i = 0; i < state.moments.size(); ++i) {
        total += state.moments[i].cost_about(state.positions[state.cells[i].owner]);
    }
    return total;
}

StateRecord record_of(const SwarmState& state) {
    return {state.time, state.positions, state.last_inputs, state.detection.flags};
}

}  // namespace

void compute_allocation(const SwarmState& state, const ScenarioConfig& config,
                        std::vector<int>& allocation, int& unassigned) {
    allocation.assign(config.targets.size(), 0);
    unassigned = 0;
    const double r2 = config.sensor.radius * config.sensor.radius;
    for (const Point& p : state.positions) {
        int best = -1;
        double best_center_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < config.targets.size(); ++t) {
            if (config.targets[t].squared_distance_to(p) > r2) continue;
            const double c2 = squared_distance(p, config.targets[t].center());
            if (c2 < best_center_d2) {
                best_center_d2 = c2;
                best = static_cast<int>(t);
            }
        }
        if (best >= 0) {
            ++allocation[best];
        } else {
            ++unassigned;
        }
    }
}

SwarmState reconstruct_state(const RunResult& result, std::size_t record_index) {
    const StateRecord& rec = result.records.at(record_index);
    SwarmState state;
    state.time = rec.time;
    state.positions = rec.positions;
    state.last_inputs = rec.inputs;
    evaluate_pipeline(state.positions, result.config, nullptr, state);
    return state;
}

RunResult run(const ScenarioConfig& config, std::uint64_t seed) {
    RunResult result;
    result.config = config;
    result.seed = seed;

    SwarmState state = make_initial_state(config);
    result.records.push_back(record_of(state));
    result.cost_history.emplace_back(state.time, cost_of_state(state));
    result.min_dist_history.emplace_back(state.time, recorded_min_distance(state.positions));

    StopReason reason = check_termination(state, config);
    int step_index = 0;
    while (reason == StopReason::running) {
        ++step_index;
        try {
            state = step(state, config);
        } catch (const std::exception& e) {
            auto err = RunError(step_index, e.what());
            err.partial = std::make_shared<RunResult>(std::move(result));
            throw err;
        }
        result.records.push_back(record_of(state));
        result.cost_history.emplace_back(state.time, cost_of_state(state));
        result.min_dist_history.emplace_back(state.time, recorded_min_distance(state.positions));
        reason = check_termination(state, config);
    }

    result.terminated_reason = reason;
    compute_allocation(state, config, result.final_allocation, result.unassigned);
    return result;
}

}  // namespace covsim
