#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "covsim/coverage.hpp"
#include "covsim/engine.hpp"
#include "covsim/geometry.hpp"
#include "covsim/safety.hpp"

namespace {

using namespace covsim;

std::vector<Point> lattice_sites(int count) {
    std::vector<Point> sites;
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);
    for (int i = 0; i < count; ++i) {
        const double x = 1.0 + (i % 5) * 2.0 + jitter(rng);
        const double y = 1.5 + (i / 5) * 2.5 + jitter(rng);
        sites.push_back({x, y});
    }
    return sites;
}

void BM_voronoi_tessellation(benchmark::State& state) {
    const Workspace ws{{0.0, 0.0}, {10.0, 10.0}};
    const auto sites = lattice_sites(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(voronoi_tessellation(sites, ws));
    }
}
BENCHMARK(BM_voronoi_tessellation)->Arg(10)->Arg(15);

void BM_integrate_cell(benchmark::State& state) {
    const Workspace ws{{0.0, 0.0}, {10.0, 10.0}};
    const auto sites = lattice_sites(10);
    const auto cells = voronoi_tessellation(sites, ws);
    DensityField field;
    field.baseline = 0.01;
    for (int i = 0; i < 4; ++i) {
        field.components.push_back({10.0, 0.7, 0.7, sites[i]});
    }
    const int resolution = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate_cell(cells[3], field, resolution));
    }
}
BENCHMARK(BM_integrate_cell)->Arg(64)->Arg(128)->Arg(192);

void BM_solve_safety_qp(benchmark::State& state) {
    const int agents = static_cast<int>(state.range(0));
    std::vector<Point> pos;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 4.0);
    while (static_cast<int>(pos.size()) < agents) {
        Point p{uni(rng), uni(rng)};
        bool ok = true;
        for (const Point& q : pos) ok = ok && distance(p, q) > 0.3;
        if (ok) pos.push_back(p);
    }
    std::vector<ControlInput> nominal(agents);
    std::uniform_real_distribution<double> vel(-2.0, 2.0);
    for (auto& u : nominal) u = {vel(rng), vel(rng)};
    const auto rows = assemble_constraints(pos, {0.6, 1.0});
    QpOptions opts;
    opts.u_max = 2.0;
    opts.retreat_hint = pos;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_safety_qp(nominal, rows, opts));
    }
}
BENCHMARK(BM_solve_safety_qp)->Arg(10)->Arg(15);

void BM_engine_step(benchmark::State& state) {
    ScenarioConfig cfg;
    cfg.workspace = {{0.0, 0.0}, {10.0, 10.0}};
    cfg.agent_count = 10;
    cfg.formation.kind = Formation::Kind::grid;
    cfg.formation.rows = 2;
    cfg.formation.cols = 5;
    cfg.formation.spacing = 1.0;
    cfg.formation.origin = {3.0, 4.5};
    cfg.targets = {{0, {1.25, 1.25}, {2.75, 2.75}}, {1, {7.25, 7.25}, {8.75, 8.75}}};
    cfg.density.sigma_x = {0.7};
    cfg.density.sigma_y = {0.7};
    cfg.d_min = 0.64;
    cfg.u_max = 2.0;
    cfg.resolution = 64;
    const SwarmState initial = make_initial_state(cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(step(initial, cfg));
    }
}
BENCHMARK(BM_engine_step);

}  // namespace

BENCHMARK_MAIN();
