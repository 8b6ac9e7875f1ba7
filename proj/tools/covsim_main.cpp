// Command-line front end: runs scenario files, validates them, and emits the
// fine-grid centroid reference used to cross-check the quadrature.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "covsim/engine.hpp"
#include "covsim/errors.hpp"
#include "covsim/output.hpp"
#include "covsim/render.hpp"
#include "covsim/scenario_io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct RunArgs {
    std::string scenario;
    std::string out_dir = "covsim_out";
    std::vector<double> snapshots;
    std::uint64_t seed = 0;
    int resolution = 0;  // 0 = keep scenario value
    double dt = 0.0;     // 0 = keep scenario value
};

covsim::ScenarioConfig load_config(const std::string& path, int resolution, double dt) {
    covsim::ScenarioConfig cfg = covsim::parse_scenario(path);
    covsim::CliOverrides overrides;
    if (dt > 0.0) overrides.dt = dt;
    if (resolution > 0) overrides.resolution = resolution;
    return covsim::apply_overrides(cfg, overrides);
}

int do_run(const RunArgs& args) {
    const covsim::ScenarioConfig cfg = load_config(args.scenario, args.resolution, args.dt);
    const covsim::RunResult result = covsim::run(cfg, args.seed);

    fs::create_directories(args.out_dir);
    const fs::path out(args.out_dir);
    covsim::write_trajectory(result, out / "trajectory.csv");
    covsim::write_metrics(result, out / "metrics.json");
    {
        std::FILE* f = std::fopen((out / "resolved.ini").string().c_str(), "wb");
        if (!f) throw covsim::IoError((out / "resolved.ini").string(), "cannot open");
        const std::string echo = covsim::write_scenario(cfg);
        std::fwrite(echo.data(), 1, echo.size(), f);
        std::fclose(f);
    }

    for (double t : args.snapshots) {
        const double step_f = t / cfg.dt;
        std::size_t index = static_cast<std::size_t>(std::llround(std::max(0.0, step_f)));
        index = std::min(index, result.records.size() - 1);
        const covsim::SwarmState state = covsim::reconstruct_state(result, index);
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_t%.2f.svg", state.time);
        covsim::render_snapshot(state, state.field, cfg, out / name);
    }

    std::cout << "terminated: " << covsim::to_string(result.terminated_reason) << " at t = "
              << result.final_time() << " s after " << result.steps() << " steps\n";
    std::cout << "min pairwise distance: " << result.min_distance_overall() << " m\n";
    std::cout << "allocation:";
    for (int c : result.final_allocation) std::cout << " " << c;
    std::cout << " (unassigned " << result.unassigned << ")\n";
    std::cout << "outputs in " << fs::absolute(out).string() << "\n";
    return kExitOk;
}

int do_validate(const std::string& scenario) {
    const covsim::ScenarioConfig cfg = covsim::parse_scenario(scenario);
    std::cout << covsim::write_scenario(cfg);
    return kExitOk;
}

// Scanline reference integration, deliberately separate from the library's
// masked-grid quadrature.
void fine_grid_reference(const covsim::ConvexPolygon& poly, const covsim::DensityField& field,
                         int resolution, double& mass, covsim::Point& centroid) {
    covsim::Point lo, hi;
    poly.bounding_box(lo, hi);
    const double hx = (hi.x - lo.x) / resolution;
    const double hy = (hi.y - lo.y) / resolution;
    const std::size_t n = poly.size();
    double sm = 0.0, smx = 0.0, smy = 0.0;
    for (int iy = 0; iy < resolution; ++iy) {
        const double qy = lo.y + (iy + 0.5) * hy;
        double xl = 0.0, xr = 0.0;
        int crossings = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const covsim::Point& v = poly[k];
            const covsim::Point& w = poly[(k + 1) % n];
            if ((v.y <= qy) == (w.y <= qy)) continue;
            const double t = (qy - v.y) / (w.y - v.y);
            const double x = v.x + t * (w.x - v.x);
            if (crossings == 0) {
                xl = xr = x;
            } else {
                xl = std::min(xl, x);
                xr = std::max(xr, x);
            }
            ++crossings;
        }
        if (crossings < 2) continue;
        const int ix_lo = std::max(0, static_cast<int>(std::ceil((xl - lo.x) / hx - 0.5)));
        const int ix_hi =
            std::min(resolution - 1, static_cast<int>(std::floor((xr - lo.x) / hx - 0.5)));
        for (int ix = ix_lo; ix <= ix_hi; ++ix) {
            const double qx = lo.x + (ix + 0.5) * hx;
            const double phi = covsim::evaluate_density(field, {qx, qy});
            sm += phi;
            smx += phi * qx;
            smy += phi * qy;
        }
    }
    const double w = hx * hy;
    mass = sm * w;
    centroid = mass > 0.0 ? covsim::Point{smx * w / mass, smy * w / mass} : covsim::Point{};
}

int do_oracle_centroid(const std::string& scenario, int cell_index, int resolution) {
    const covsim::ScenarioConfig cfg = covsim::parse_scenario(scenario);
    const covsim::SwarmState state = covsim::make_initial_state(cfg);
    if (cell_index < 0 || cell_index >= static_cast<int>(state.cells.size())) {
        throw covsim::ValidationError("cell", "index out of range (0.." +
                                                  std::to_string(state.cells.size() - 1) + ")");
    }
    double mass = 0.0;
    covsim::Point centroid;
    fine_grid_reference(state.cells[cell_index].region, state.field, resolution, mass, centroid);
    std::printf("{\n  \"cell\": %d,\n  \"resolution\": %d,\n  \"mass\": %.17g,\n"
                "  \"centroid\": [%.17g, %.17g]\n}\n",
                cell_index, resolution, mass, centroid.x, centroid.y);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Density-driven coverage simulation with barrier-certified collision avoidance"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* cmd_run = app.add_subcommand("run", "Run a scenario and write outputs");
    cmd_run->add_option("scenario", run_args.scenario, "Scenario file")->required();
    cmd_run->add_option("--out", run_args.out_dir, "Output directory");
    cmd_run->add_option("--snapshots", run_args.snapshots, "Snapshot times (seconds)")
        ->delimiter(',');
    cmd_run->add_option("--seed", run_args.seed, "Seed echoed into outputs");
    cmd_run->add_option("--resolution", run_args.resolution, "Quadrature resolution override");
    cmd_run->add_option("--dt", run_args.dt, "Time step override (seconds)");

    std::string validate_path;
    CLI::App* cmd_validate = app.add_subcommand("validate", "Parse and echo a scenario");
    cmd_validate->add_option("scenario", validate_path, "Scenario file")->required();

    std::string oracle_path;
    int oracle_cell = 0;
    int oracle_resolution = 2048;
    CLI::App* cmd_oracle =
        app.add_subcommand("oracle-centroid", "Fine-grid centroid reference for one cell");
    cmd_oracle->add_option("scenario", oracle_path, "Scenario file")->required();
    cmd_oracle->add_option("--cell", oracle_cell, "Cell index")->required();
    cmd_oracle->add_option("--resolution", oracle_resolution, "Reference grid resolution");

    try {
        app.parse(argc, argv);
        if (cmd_run->parsed()) return do_run(run_args);
        if (cmd_validate->parsed()) return do_validate(validate_path);
        if (cmd_oracle->parsed()) {
            return do_oracle_centroid(oracle_path, oracle_cell, oracle_resolution);
        }
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    } catch (const covsim::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const covsim::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const covsim::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
