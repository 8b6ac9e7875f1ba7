#include "covsim/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "covsim/errors.hpp"
#include "json.hpp"

namespace covsim {

namespace {

void append_row(std::string& out, double t, int agent, const Point& p, const ControlInput& u,
                int rho) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.6f,%d,%.9f,%.9f,%.9f,%.9f,%d\n", t, agent, p.x, p.y, u.ux,
                  u.uy, rho);
    out += buf;
}

nlohmann::ordered_json config_json(const ScenarioConfig& cfg) {
    nlohmann::ordered_json j;
    j["workspace"] = {{"min_x", cfg.workspace.min_corner.x},
                      {"min_y", cfg.workspace.min_corner.y},
                      {"max_x", cfg.workspace.max_corner.x},
                      {"max_y", cfg.workspace.max_corner.y}};
    j["targets"] = nlohmann::ordered_json::array();
    for (const TargetRegion& t : cfg.targets) {
        j["targets"].push_back({{"id", t.id},
                                {"min_x", t.min_corner.x},
                                {"min_y", t.min_corner.y},
                                {"max_x", t.max_corner.x},
                                {"max_y", t.max_corner.y}});
    }
    nlohmann::ordered_json formation;
    switch (cfg.formation.kind) {
        case Formation::Kind::grid:
            formation["kind"] = "grid";
            formation["rows"] = cfg.formation.rows;
            formation["cols"] = cfg.formation.cols;
            formation["spacing"] = cfg.formation.spacing;
            formation["origin_x"] = cfg.formation.origin.x;
            formation["origin_y"] = cfg.formation.origin.y;
            break;
        case Formation::Kind::triangle:
            formation["kind"] = "triangle";
            formation["rows"] = cfg.formation.rows;
            formation["spacing"] = cfg.formation.spacing;
            formation["origin_x"] = cfg.formation.origin.x;
            formation["origin_y"] = cfg.formation.origin.y;
            break;
        case Formation::Kind::explicit_points: {
            formation["kind"] = "explicit";
            auto pts = nlohmann::ordered_json::array();
            for (const Point& p : cfg.formation.points) pts.push_back({p.x, p.y});
            formation["points"] = pts;
            break;
        }
    }
    j["agents"] = {{"count", cfg.agent_count},
                   {"formation", formation},
                   {"sensor_radius", cfg.sensor.radius}};
    j["density"] = {{"baseline", cfg.density.baseline},
                    {"weight", cfg.density.weights},
                    {"sigma_x", cfg.density.sigma_x},
                    {"sigma_y", cfg.density.sigma_y},
                    {"mask_mode",
                     cfg.density.mask_mode == MaskMode::off ? "off" : "detected-region-boost"},
                    {"region_bonus", cfg.density.region_bonus},
                    {"latch_detection", cfg.latch_detection}};
    j["gains"] = {{"k", cfg.gain_k}, {"gamma", cfg.gamma}, {"d_min", cfg.d_min},
                  {"u_max", cfg.u_max}};
    j["numerics"] = {{"dt", cfg.dt}, {"resolution", cfg.resolution}};
    j["stop"] = {{"t_max", cfg.t_max}};
    return j;
}

nlohmann::ordered_json history_json(const std::vector<std::pair<double, double>>& h) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [t, v] : h) {
        if (std::isfinite(v)) {
            arr.push_back({t, v});
        } else {
            arr.push_back({t, nullptr});
        }
    }
    return arr;
}

}  // namespace

std::string trajectory_csv(const RunResult& result) {
    std::string out = "t,agent,x,y,ux,uy,rho\n";
    for (std::size_t s = 1; s < result.records.size(); ++s) {
        const StateRecord& rec = result.records[s];
        for (std::size_t i = 0; i < rec.positions.size(); ++i) {
            append_row(out, rec.time, static_cast<int>(i), rec.positions[i], rec.inputs[i],
                       rec.rho[i]);
        }
    }
    return out;
}

void write_trajectory(const RunResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << trajectory_csv(result);
    if (!out) throw IoError(path.string(), "write failed");
}

std::string metrics_document(const RunResult& result) {
    nlohmann::ordered_json j;
    j["terminated_reason"] = to_string(result.terminated_reason);
    j["steps"] = result.steps();
    j["final_time"] = result.records.back().time;
    j["final_allocation"] = result.final_allocation;
    j["unassigned"] = result.unassigned;
    const double overall = result.min_distance_overall();
    j["min_distance_overall"] =
        std::isfinite(overall) ? nlohmann::ordered_json(overall) : nlohmann::ordered_json(nullptr);
    j["cost_history"] = history_json(result.cost_history);
    j["min_dist_history"] = history_json(result.min_dist_history);
    j["seed"] = result.seed;
    j["config"] = config_json(result.config);
    return j.dump(2) + "\n";
}

void write_metrics(const RunResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << metrics_document(result);
    if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace covsim
