#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "optosync/classical.hpp"
#include "optosync/core_model.hpp"
#include "optosync/sync_measures.hpp"

namespace optosync {

enum class InitialCovariance { thermal_vacuum, vacuum };

struct ScenarioConfig {
  std::string name = "custom";
  SystemParams params;
  double t_end = 2000.0;
  double dt = 1e-3;
  std::size_t decimate = 100;
  ClassicalState initial_state;
  InitialCovariance initial_covariance = InitialCovariance::thermal_vacuum;
  PhiMode phi_mode;
  double steady_fraction = 0.5;
  double locking_threshold = 0.1;
  std::string output_dir;
  /// Reserved; the dynamics are deterministic.
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

struct SweepAxis {
  std::string param;
  std::vector<double> values;
};

struct SweepConfig {
  ScenarioConfig base;
  /// One axis, or two for a full grid (first axis outermost).
  std::vector<SweepAxis> axes;
  std::size_t workers = 1;

  void validate() const;
};

using LoadedConfig = std::variant<ScenarioConfig, SweepConfig>;

/// Reads a flat `key = value` document ('#' starts a comment). An empty
/// document yields the defaults. Throws ConfigError with line and column
/// for syntax errors and with the key name for unknown keys or invalid
/// values.
LoadedConfig load_config(const std::filesystem::path& path);
LoadedConfig parse_config(std::string_view text, const std::string& source = "<string>");

/// Built-in configurations; see preset_names().
LoadedConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Human-readable listing of every key and its default.
std::string defaults_text();

/// Names accepted as sweep parameters (SystemParams fields except omega1).
bool is_sweepable_param(std::string_view name);
double get_param(const SystemParams& params, std::string_view name);
void set_param(SystemParams& params, std::string_view name, double value);

std::string to_string(InitialCovariance mode);
std::string to_string(PhiMode::Kind kind);

} // namespace optosync
