#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "covsim/coverage.hpp"
#include "covsim/density.hpp"
#include "covsim/errors.hpp"
#include "covsim/geometry.hpp"
#include "covsim/safety.hpp"

namespace covsim {

struct Formation {
    enum class Kind { grid, triangle, explicit_points };
    Kind kind = Kind::grid;
    int rows = 1;
    int cols = 1;
    double spacing = 1.0;
    Point origin;
    std::vector<Point> points;  // explicit_points only
};

struct ScenarioConfig {
    Workspace workspace{{0.0, 0.0}, {10.0, 10.0}};
    std::vector<TargetRegion> targets;
    int agent_count = 1;
    Formation formation;
    SensorModel sensor{1.0};
    DensityParams density;
    bool latch_detection = false;
    double gain_k = 1.0;    // 1/s, nominal controller
    double gamma = 1.0;     // 1/s, barrier decay
    double d_min = 0.5;     // meters
    double u_max = 0.0;     // m/s, box bound; <= 0 disables
    double dt = 0.05;       // seconds
    int resolution = 192;   // quadrature grid cells per axis
    double t_max = 120.0;   // seconds

    SafetyParams safety_params() const { return {d_min, gamma}; }
};

struct SwarmState {
    double time = 0.0;
    std::vector<Point> positions;
    DetectionState detection;
    DensityField field;
    std::vector<VoronoiCell> cells;
    std::vector<CellQuadrature> moments;
    std::vector<ControlInput> last_inputs;
    std::vector<int> qp_active_set;  // warm start for the next step

    std::vector<CellMoment> centroids() const;
};

enum class StopReason { running, all_detect, t_max };

std::string to_string(StopReason reason);

/// Positions, applied inputs, and detection flags at one time-grid point.
struct StateRecord {
    double time = 0.0;
    std::vector<Point> positions;
    std::vector<ControlInput> inputs;
    std::vector<std::uint8_t> rho;
};

struct RunResult {
    /// records[0] is the initial state (zero inputs); one more per step.
    std::vector<StateRecord> records;
    std::vector<std::pair<double, double>> cost_history;
    /// Distances are computed from the 9-decimal coordinate representation
    /// written to trajectory files, so the two artifacts agree exactly.
    std::vector<std::pair<double, double>> min_dist_history;
    std::vector<int> final_allocation;  // per target, config order
    int unassigned = 0;
    StopReason terminated_reason = StopReason::t_max;
    ScenarioConfig config;
    std::uint64_t seed = 0;

    int steps() const { return static_cast<int>(records.size()) - 1; }
    double final_time() const { return records.back().time; }
    double min_distance_overall() const;
};

/// Raised when a step of run() fails; carries the trajectory collected so far.
class RunError : public StepError {
public:
    using StepError::StepError;
    std::shared_ptr<RunResult> partial;
};

/// Row-major lattice: origin + (c * spacing, r * spacing).
std::vector<Point> formation_grid(int rows, int cols, double spacing, Point origin);

/// Triangular lattice with the apex at `origin`, rows growing downward and
/// centered; row r holds r+1 points, vertical pitch spacing * sqrt(3)/2.
std::vector<Point> formation_triangle(int rows, double spacing, Point origin);

/// Resolves a formation description to exactly `count` points.
std::vector<Point> formation_points(const Formation& formation, int count);

/// Initial state at t = 0 with detection, density, cells, and moments already
/// evaluated for the formation positions.
SwarmState make_initial_state(const ScenarioConfig& config);

/// One closed-loop step: detection, density, tessellation, moments, nominal
/// control, safety program, then an explicit Euler move clamped to the
/// workspace. The returned state's pipeline fields are consistent with its
/// (post-move) positions.
SwarmState step(const SwarmState& state, const ScenarioConfig& config);

StopReason check_termination(const SwarmState& state, const ScenarioConfig& config);

/// Runs a scenario to termination. Deterministic for identical (config, seed);
/// the seed is reserved for randomized initial conditions and is echoed into
/// the result. Errors are rethrown as StepError with the failing step index.
RunResult run(const ScenarioConfig& config, std::uint64_t seed = 0);

/// Per-target agent counts: an agent counts toward the target its sensor disk
/// intersects, nearest target center winning ties.
void compute_allocation(const SwarmState& state, const ScenarioConfig& config,
                        std::vector<int>& allocation, int& unassigned);

/// Rebuilds the full pipeline state (detection, field, cells, moments) for one
/// recorded time-grid point of a run. Detection is the instantaneous rule;
/// latched history is not replayed.
SwarmState reconstruct_state(const RunResult& result, std::size_t record_index);

}  // namespace covsim
