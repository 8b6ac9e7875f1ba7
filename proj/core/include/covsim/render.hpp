#pragma once

#include <filesystem>
#include <string>

#include "covsim/engine.hpp"

namespace covsim {

/// Two-panel SVG snapshot: left the workspace with targets, Voronoi cell
/// boundaries, agents, and sensor disks; right a density heatmap sampled on a
/// 128 x 128 grid. Output is a pure function of the inputs (byte-identical
/// for identical states).
std::string render_snapshot_svg(const SwarmState& state, const DensityField& field,
                                const ScenarioConfig& config);

void render_snapshot(const SwarmState& state, const DensityField& field,
                     const ScenarioConfig& config, const std::filesystem::path& path);

}  // namespace covsim
