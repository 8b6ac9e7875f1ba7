#pragma once

#include <filesystem>
#include <string>

#include "covsim/engine.hpp"

namespace covsim {

/// Header `t,agent,x,y,ux,uy,rho`, one row per agent per step (the initial
/// state is not a step). Time uses 6 decimals, coordinates and inputs 9.
std::string trajectory_csv(const RunResult& result);
void write_trajectory(const RunResult& result, const std::filesystem::path& path);

/// Metrics document: cost and minimum-distance histories, final allocation,
/// termination reason, and the fully resolved config echo.
std::string metrics_document(const RunResult& result);
void write_metrics(const RunResult& result, const std::filesystem::path& path);

}  // namespace covsim
