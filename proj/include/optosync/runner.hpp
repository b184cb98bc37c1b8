#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "optosync/classical.hpp"
#include "optosync/config.hpp"
#include "optosync/fluctuation.hpp"
#include "optosync/sync_measures.hpp"

namespace optosync {

struct SweepPointRecord {
  std::vector<double> values;
  std::string directory; // relative to the sweep directory
  bool ok = false;
  std::string error;
  bool diverged = false;
  MeasureStats s_c;
  MeasureStats s_phi;
  MeasureStats s_p;
  std::optional<bool> locked;
  double circular_std = 0.0;
  std::size_t physicality_warnings = 0;
};

/// Record of one scenario or sweep run, stored as `manifest.json` next to
/// the outputs it lists.
struct RunManifest {
  std::string kind = "scenario"; // or "sweep"
  std::string name;
  nlohmann::json config;
  std::string code_version;
  double wall_time_seconds = 0.0;
  std::filesystem::path directory;
  /// label -> file name inside `directory`
  std::map<std::string, std::string> outputs;
  std::vector<std::string> errors;

  // scenario diagnostics
  bool diverged = false;
  std::optional<double> diverged_at;
  std::size_t samples = 0;
  std::size_t physicality_warnings = 0;
  double min_symplectic_eigenvalue = 0.0;
  double max_asymmetry = 0.0;
  std::optional<PhaseLocking> locking;
  std::optional<LimitCycleSummary> limit_cycle;
  std::optional<MeasureStats> s_c;
  std::optional<MeasureStats> s_phi;
  std::optional<MeasureStats> s_p;

  // sweep results
  std::vector<std::string> sweep_params;
  std::vector<SweepPointRecord> points;

  /// 0 on success, 2 on divergence, a failed point or a failed stage.
  int exit_code() const;
};

nlohmann::json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Writes `<directory>/manifest.json` via a temporary file and rename.
std::filesystem::path write_manifest(const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

nlohmann::json config_to_json(const ScenarioConfig& cfg);
nlohmann::json config_to_json(const SweepConfig& cfg);

/// Result of the in-memory part of a scenario run.
struct ScenarioResult {
  CoupledRun run;
  std::optional<SyncSeries> sync;
};

/// Integrates and evaluates a scenario without touching the filesystem.
/// Stage failures are appended to `errors`.
ScenarioResult simulate_scenario(const ScenarioConfig& cfg, std::vector<std::string>& errors);

/// Runs one scenario and writes classical.csv, covariance.csv, sync.csv
/// and manifest.json into `out_dir`. Outputs are kept on divergence.
RunManifest run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

/// Runs every grid point (up to cfg.workers at once) into
/// `out_dir/point_NNN/`, then writes sweep_summary.csv and manifest.json.
/// Failed points are recorded and do not stop the sweep.
RunManifest run_sweep(const SweepConfig& cfg, const std::filesystem::path& out_dir);

/// CSV writers. Numbers use 17 significant digits.
void write_classical_csv(const ClassicalTrajectory& traj, const std::filesystem::path& path);
void write_covariance_csv(const CoupledTrajectory& traj, const std::filesystem::path& path);
void write_sync_csv(const SyncSeries& series, const std::filesystem::path& path);

/// Writes `text` to `path` through a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

std::string code_version();

} // namespace optosync
