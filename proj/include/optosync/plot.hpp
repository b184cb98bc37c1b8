#pragma once

#include <filesystem>
#include <vector>

#include "optosync/runner.hpp"

namespace optosync {

/// Writes gnuplot scripts next to the run outputs and returns their paths.
///
/// Scenario runs get mean_values.gp (q_js, p_js vs tau), phase_space.gp
/// (p_js vs q_js), cavity_quadratures.gp (x_j, y_j vs tau) and sync.gp
/// (S_c, S_phi, S_p vs tau). Sweeps get sweep_summary.gp (steady-window
/// means vs the first swept parameter) and sweep_sync.gp (S_p time series
/// of every point).
///
/// Throws Error naming the first CSV the manifest lists but which is
/// missing. Scripts are still written for diverged runs.
std::vector<std::filesystem::path> emit_plot_scripts(const RunManifest& manifest);

} // namespace optosync
