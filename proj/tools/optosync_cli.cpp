#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <variant>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "optosync/config.hpp"
#include "optosync/errors.hpp"
#include "optosync/plot.hpp"
#include "optosync/runner.hpp"

namespace fs = std::filesystem;
using namespace optosync;

namespace {

LoadedConfig resolve(const std::string& config_path, const std::string& preset_name) {
  if (!config_path.empty() && !preset_name.empty()) {
    throw ConfigError("give either a config file or --preset, not both "
                      "(use 'preset = <name>' inside the file to combine them)");
  }
  if (!preset_name.empty()) {
    return preset(preset_name);
  }
  if (!config_path.empty()) {
    return load_config(config_path);
  }
  return ScenarioConfig{};
}

fs::path output_dir(const std::string& cli_out, const std::string& cfg_out,
                    const std::string& name) {
  if (!cli_out.empty()) return cli_out;
  if (!cfg_out.empty()) return cfg_out;
  return fs::path("out") / name;
}

void print_scenario(const RunManifest& m) {
  fmt::print("{}: {} samples written to {}\n", m.name, m.samples, m.directory.string());
  if (m.locking) {
    fmt::print("  phase locking: circular std {:.4g} rad, drift {:.4g} rad, locked = {}\n",
               m.locking->circular_std, m.locking->drift, m.locking->locked);
  }
  if (m.s_c) {
    fmt::print("  steady mean S_c = {:.6g}, S_phi = {:.6g}, S_p = {:.6g}\n", m.s_c->mean,
               m.s_phi->mean, m.s_p->mean);
  }
  fmt::print("  min symplectic eigenvalue {:.10g}, physicality warnings {}\n",
             m.min_symplectic_eigenvalue, m.physicality_warnings);
  for (const auto& e : m.errors) {
    fmt::print(stderr, "  error: {}\n", e);
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coulomb-coupled optomechanical synchronization simulator"};
  app.require_subcommand(0, 1);

  bool print_defaults = false;
  bool list_presets = false;
  app.add_flag("--print-defaults", print_defaults, "Print every config key with its default");
  app.add_flag("--list-presets", list_presets, "List built-in presets");

  std::string run_config, run_preset, run_out;
  auto* run = app.add_subcommand("run", "Run a single scenario");
  run->add_option("config", run_config, "Config file")->check(CLI::ExistingFile);
  run->add_option("--preset", run_preset, "Built-in preset name");
  run->add_option("--out", run_out, "Output directory");

  std::string sweep_config, sweep_preset, sweep_out;
  std::optional<std::size_t> sweep_workers;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("config", sweep_config, "Sweep config file")->check(CLI::ExistingFile);
  sweep->add_option("--preset", sweep_preset, "Built-in preset name");
  sweep->add_option("--out", sweep_out, "Output directory");
  sweep->add_option("--workers", sweep_workers, "Concurrent sweep points")
      ->check(CLI::PositiveNumber);

  std::string manifest_path;
  auto* plot = app.add_subcommand("plot", "Emit gnuplot scripts for a finished run");
  plot->add_option("manifest", manifest_path, "manifest.json of a run or sweep")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (print_defaults) {
      std::cout << defaults_text();
      return 0;
    }
    if (list_presets) {
      for (const auto& p : preset_names()) {
        std::cout << p << '\n';
      }
      return 0;
    }
    if (*run) {
      const auto loaded = resolve(run_config, run_preset);
      const auto* cfg = std::get_if<ScenarioConfig>(&loaded);
      if (cfg == nullptr) {
        throw ConfigError("this is a sweep configuration; use 'sweep'");
      }
      const auto m = run_scenario(*cfg, output_dir(run_out, cfg->output_dir, cfg->name));
      print_scenario(m);
      return m.exit_code();
    }
    if (*sweep) {
      const auto loaded = resolve(sweep_config, sweep_preset);
      const auto* found = std::get_if<SweepConfig>(&loaded);
      if (found == nullptr) {
        throw ConfigError("no sweep_param/sweep_values in this configuration; use 'run'");
      }
      SweepConfig cfg = *found;
      if (sweep_workers) {
        cfg.workers = *sweep_workers;
      }
      const auto m = run_sweep(cfg, output_dir(sweep_out, cfg.base.output_dir, cfg.base.name));
      fmt::print("sweep {}: {} points written to {}\n", m.name, m.points.size(),
                 m.directory.string());
      for (const auto& p : m.points) {
        fmt::print("  {} {}: mean S_c {:.6g}, S_phi {:.6g}, S_p {:.6g}{}\n", p.directory,
                   fmt::join(p.values, ","), p.s_c.mean, p.s_phi.mean, p.s_p.mean,
                   p.ok ? "" : " [" + p.error + "]");
      }
      return m.exit_code();
    }
    if (*plot) {
      const auto m = read_manifest(manifest_path);
      for (const auto& path : emit_plot_scripts(m)) {
        std::cout << path.string() << '\n';
      }
      return 0;
    }
    std::cout << app.help();
    return 0;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
