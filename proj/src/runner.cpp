#include "optosync/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "optosync/errors.hpp"

#ifndef OPTOSYNC_VERSION
#define OPTOSYNC_VERSION "0.0.0"
#endif

namespace optosync {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json stats_json(const MeasureStats& s) {
  return {{"mean", s.mean}, {"min", s.min}, {"max", s.max}};
}

MeasureStats stats_from(const json& j) {
  const auto num = [&j](const char* key) {
    return j.at(key).is_null() ? std::nan("") : j.at(key).get<double>();
  };
  return {num("mean"), num("min"), num("max")};
}

json orbit_json(const OrbitSummary& o) {
  return {{"amplitude", o.amplitude},
          {"period", o.period},
          {"cycle_amplitude_variation", o.cycle_amplitude_variation},
          {"cycles", o.cycles},
          {"closed_orbit", o.closed_orbit}};
}

OrbitSummary orbit_from(const json& j) {
  OrbitSummary o;
  o.amplitude = j.at("amplitude").get<double>();
  o.period = j.at("period").get<double>();
  o.cycle_amplitude_variation = j.at("cycle_amplitude_variation").get<double>();
  o.cycles = j.at("cycles").get<std::size_t>();
  o.closed_orbit = j.at("closed_orbit").get<bool>();
  return o;
}

void append_number(std::string& out, double v) {
  fmt::format_to(std::back_inserter(out), "{:.17g}", v);
}

} // namespace

std::string code_version() { return OPTOSYNC_VERSION; }

int RunManifest::exit_code() const {
  if (kind == "sweep") {
    const bool failed = std::any_of(points.begin(), points.end(),
                                    [](const SweepPointRecord& p) { return !p.ok; });
    return failed || !errors.empty() ? 2 : 0;
  }
  return diverged || !errors.empty() ? 2 : 0;
}

json config_to_json(const ScenarioConfig& cfg) {
  json params;
  for (const char* name : {"omega1", "omega2", "delta1", "delta2", "g1", "g2", "gamma_m1",
                           "gamma_m2", "kappa1", "kappa2", "tunnel_j", "chi_c", "drive1",
                           "drive2", "n_th"}) {
    params[name] = get_param(cfg.params, name);
  }
  const auto s = cfg.initial_state.to_array();
  return {{"name", cfg.name},
          {"params", params},
          {"t_end", cfg.t_end},
          {"dt", cfg.dt},
          {"decimate", cfg.decimate},
          {"initial_state", s},
          {"initial_covariance", to_string(cfg.initial_covariance)},
          {"phi_mode", to_string(cfg.phi_mode.kind)},
          {"phi", cfg.phi_mode.phi},
          {"steady_fraction", cfg.steady_fraction},
          {"locking_threshold", cfg.locking_threshold},
          {"seed", cfg.seed}};
}

json config_to_json(const SweepConfig& cfg) {
  json axes = json::array();
  for (const auto& a : cfg.axes) {
    axes.push_back({{"param", a.param}, {"values", a.values}});
  }
  return {{"base", config_to_json(cfg.base)}, {"axes", axes}, {"workers", cfg.workers}};
}

json to_json(const RunManifest& m) {
  json j;
  j["kind"] = m.kind;
  j["name"] = m.name;
  j["config"] = m.config;
  j["code_version"] = m.code_version;
  j["wall_time_seconds"] = m.wall_time_seconds;
  j["directory"] = m.directory.string();
  j["outputs"] = m.outputs;
  j["errors"] = m.errors;
  j["exit_code"] = m.exit_code();
  if (m.kind == "sweep") {
    j["sweep_params"] = m.sweep_params;
    json points = json::array();
    for (const auto& p : m.points) {
      json jp = {{"values", p.values},
                 {"directory", p.directory},
                 {"ok", p.ok},
                 {"error", p.error},
                 {"diverged", p.diverged},
                 {"S_c", stats_json(p.s_c)},
                 {"S_phi", stats_json(p.s_phi)},
                 {"S_p", stats_json(p.s_p)},
                 {"circular_std", p.circular_std},
                 {"physicality_warnings", p.physicality_warnings}};
      jp["locked"] = p.locked ? json(*p.locked) : json(nullptr);
      points.push_back(jp);
    }
    j["points"] = points;
    return j;
  }
  j["diverged"] = m.diverged;
  j["diverged_at"] = m.diverged_at ? json(*m.diverged_at) : json(nullptr);
  j["samples"] = m.samples;
  j["physicality_warnings"] = m.physicality_warnings;
  j["min_symplectic_eigenvalue"] = m.min_symplectic_eigenvalue;
  j["max_asymmetry"] = m.max_asymmetry;
  if (m.locking) {
    j["phase_locking"] = {{"mean_dphi", m.locking->mean_dphi},
                          {"circular_std", m.locking->circular_std},
                          {"drift", m.locking->drift},
                          {"locked", m.locking->locked}};
  }
  if (m.limit_cycle) {
    j["limit_cycle"] = {{"resonator1", orbit_json(m.limit_cycle->resonator1)},
                        {"resonator2", orbit_json(m.limit_cycle->resonator2)}};
  }
  if (m.s_c) j["steady_S_c"] = stats_json(*m.s_c);
  if (m.s_phi) j["steady_S_phi"] = stats_json(*m.s_phi);
  if (m.s_p) j["steady_S_p"] = stats_json(*m.s_p);
  return j;
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  m.kind = j.at("kind").get<std::string>();
  m.name = j.at("name").get<std::string>();
  m.config = j.at("config");
  m.code_version = j.at("code_version").get<std::string>();
  m.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  m.directory = j.at("directory").get<std::string>();
  m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
  m.errors = j.at("errors").get<std::vector<std::string>>();
  if (m.kind == "sweep") {
    m.sweep_params = j.at("sweep_params").get<std::vector<std::string>>();
    for (const auto& jp : j.at("points")) {
      SweepPointRecord p;
      p.values = jp.at("values").get<std::vector<double>>();
      p.directory = jp.at("directory").get<std::string>();
      p.ok = jp.at("ok").get<bool>();
      p.error = jp.at("error").get<std::string>();
      p.diverged = jp.at("diverged").get<bool>();
      p.s_c = stats_from(jp.at("S_c"));
      p.s_phi = stats_from(jp.at("S_phi"));
      p.s_p = stats_from(jp.at("S_p"));
      if (!jp.at("locked").is_null()) p.locked = jp.at("locked").get<bool>();
      p.circular_std = jp.at("circular_std").get<double>();
      p.physicality_warnings = jp.at("physicality_warnings").get<std::size_t>();
      m.points.push_back(p);
    }
    return m;
  }
  m.diverged = j.at("diverged").get<bool>();
  if (!j.at("diverged_at").is_null()) m.diverged_at = j.at("diverged_at").get<double>();
  m.samples = j.at("samples").get<std::size_t>();
  m.physicality_warnings = j.at("physicality_warnings").get<std::size_t>();
  m.min_symplectic_eigenvalue = j.at("min_symplectic_eigenvalue").is_null()
                                    ? std::nan("")
                                    : j.at("min_symplectic_eigenvalue").get<double>();
  m.max_asymmetry = j.at("max_asymmetry").get<double>();
  if (j.contains("phase_locking")) {
    const auto& l = j.at("phase_locking");
    m.locking = PhaseLocking{l.at("mean_dphi").get<double>(), l.at("circular_std").get<double>(),
                             l.at("drift").get<double>(), l.at("locked").get<bool>()};
  }
  if (j.contains("limit_cycle")) {
    m.limit_cycle = LimitCycleSummary{orbit_from(j.at("limit_cycle").at("resonator1")),
                                      orbit_from(j.at("limit_cycle").at("resonator2"))};
  }
  if (j.contains("steady_S_c")) m.s_c = stats_from(j.at("steady_S_c"));
  if (j.contains("steady_S_phi")) m.s_phi = stats_from(j.at("steady_S_phi"));
  if (j.contains("steady_S_p")) m.s_p = stats_from(j.at("steady_S_p"));
  return m;
}

void write_file_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(fmt::format("cannot write '{}'", tmp.string()));
    }
    out << text;
    if (!out.flush()) {
      throw Error(fmt::format("write failed for '{}'", tmp.string()));
    }
  }
  fs::rename(tmp, path);
}

fs::path write_manifest(const RunManifest& manifest) {
  const fs::path path = manifest.directory / "manifest.json";
  write_file_atomic(path, to_json(manifest).dump(2) + "\n");
  return path;
}

RunManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(fmt::format("cannot open manifest '{}'", path.string()));
  }
  RunManifest m = manifest_from_json(json::parse(in));
  // outputs are resolved relative to the manifest's own location
  m.directory = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  return m;
}

void write_classical_csv(const ClassicalTrajectory& traj, const fs::path& path) {
  std::string out = "tau,q1s,p1s,re_a1,im_a1,q2s,p2s,re_a2,im_a2\n";
  out.reserve(traj.size() * 9 * 24);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    append_number(out, traj.times[k]);
    for (double v : traj.states[k].to_array()) {
      out += ',';
      append_number(out, v);
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_covariance_csv(const CoupledTrajectory& traj, const fs::path& path) {
  constexpr std::size_t n = quad::kDim;
  std::string out = "tau";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      fmt::format_to(std::back_inserter(out), ",V_{}_{}", i, j);
    }
  }
  out += '\n';
  out.reserve(out.size() + traj.size() * 37 * 24);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    append_number(out, traj.classical.times[k]);
    const auto& v = traj.covariances[k];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        out += ',';
        append_number(out, v(i, j));
      }
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_sync_csv(const SyncSeries& series, const fs::path& path) {
  std::string out = "tau,S_c,S_phi,S_p,phi1,phi2,dphi_unwrapped,min_symplectic_eig\n";
  out.reserve(series.samples.size() * 8 * 24);
  for (const auto& s : series.samples) {
    append_number(out, s.tau);
    for (double v : {s.s_c, s.s_phi, s.s_p, s.phi1, s.phi2, s.dphi_unwrapped,
                     s.min_symplectic}) {
      out += ',';
      append_number(out, v);
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

ScenarioResult simulate_scenario(const ScenarioConfig& cfg, std::vector<std::string>& errors) {
  cfg.validate();
  const CovarianceMatrix v0 = cfg.initial_covariance == InitialCovariance::vacuum
                                  ? default_initial_covariance(SystemParams{.n_th = 0.0})
                                  : default_initial_covariance(cfg.params);
  ScenarioResult result{integrate_coupled_partial(cfg.params, cfg.initial_state, v0, cfg.t_end,
                                                  cfg.dt, cfg.decimate),
                        std::nullopt};
  if (result.run.diverged_at) {
    errors.push_back(fmt::format("integration diverged at tau = {}", *result.run.diverged_at));
  }
  try {
    result.sync = sync_series(result.run.trajectory, cfg.phi_mode, cfg.steady_fraction);
  } catch (const Error& e) {
    errors.push_back(fmt::format("sync_series: {}", e.what()));
  }
  return result;
}

RunManifest run_scenario(const ScenarioConfig& cfg, const fs::path& out_dir) {
  const auto started = std::chrono::steady_clock::now();
  RunManifest m;
  m.kind = "scenario";
  m.name = cfg.name;
  m.config = config_to_json(cfg);
  m.code_version = code_version();
  m.directory = out_dir;
  fs::create_directories(out_dir);

  const ScenarioResult result = simulate_scenario(cfg, m.errors);
  const auto& traj = result.run.trajectory;
  m.diverged = result.run.diverged_at.has_value();
  m.diverged_at = result.run.diverged_at;
  m.samples = traj.size();
  m.physicality_warnings = traj.warning_count();
  m.min_symplectic_eigenvalue = traj.min_symplectic.empty()
                                    ? std::nan("")
                                    : *std::min_element(traj.min_symplectic.begin(),
                                                        traj.min_symplectic.end());
  for (const auto& v : traj.covariances) {
    m.max_asymmetry = std::max(m.max_asymmetry, v.max_asymmetry());
  }

  write_classical_csv(traj.classical, out_dir / "classical.csv");
  m.outputs["classical"] = "classical.csv";
  write_covariance_csv(traj, out_dir / "covariance.csv");
  m.outputs["covariance"] = "covariance.csv";
  if (result.sync) {
    write_sync_csv(*result.sync, out_dir / "sync.csv");
    m.outputs["sync"] = "sync.csv";
    m.s_c = result.sync->s_c;
    m.s_phi = result.sync->s_phi;
    m.s_p = result.sync->s_p;
  }

  try {
    m.locking = phase_locking_metric(traj.classical, cfg.steady_fraction, cfg.locking_threshold);
  } catch (const InsufficientData& e) {
    m.errors.emplace_back(e.what());
  }
  try {
    m.limit_cycle = limit_cycle_summary(traj.classical, cfg.steady_fraction);
  } catch (const InsufficientData&) {
    // no oscillation to summarize (e.g. a stationary state); not an error
  }

  m.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_manifest(m);
  return m;
}

RunManifest run_sweep(const SweepConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);

  std::vector<std::vector<double>> grid;
  for (double a : cfg.axes[0].values) {
    if (cfg.axes.size() == 1) {
      grid.push_back({a});
    } else {
      for (double b : cfg.axes[1].values) {
        grid.push_back({a, b});
      }
    }
  }

  std::vector<SweepPointRecord> records(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < grid.size(); k = next++) {
      auto& rec = records[k];
      rec.values = grid[k];
      rec.directory = fmt::format("point_{:03d}", k);
      ScenarioConfig point = cfg.base;
      for (std::size_t a = 0; a < cfg.axes.size(); ++a) {
        set_param(point.params, cfg.axes[a].param, grid[k][a]);
      }
      try {
        const RunManifest pm = run_scenario(point, out_dir / rec.directory);
        rec.diverged = pm.diverged;
        rec.physicality_warnings = pm.physicality_warnings;
        if (pm.s_c) {
          rec.s_c = *pm.s_c;
          rec.s_phi = *pm.s_phi;
          rec.s_p = *pm.s_p;
        }
        if (pm.locking) {
          rec.locked = pm.locking->locked;
          rec.circular_std = pm.locking->circular_std;
        }
        rec.ok = pm.exit_code() == 0;
        if (!pm.errors.empty()) {
          rec.error = pm.errors.front();
        }
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
      }
    }
  };
  const std::size_t n_workers = std::min(cfg.workers, std::max<std::size_t>(grid.size(), 1));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) {
      pool.emplace_back(worker);
    }
  }

  std::string csv;
  for (const auto& axis : cfg.axes) {
    csv += axis.param + ',';
  }
  csv += "status,mean_S_c,min_S_c,max_S_c,mean_S_phi,min_S_phi,max_S_phi,"
         "mean_S_p,min_S_p,max_S_p,locked,circular_std_dphi,physicality_warnings,directory\n";
  for (const auto& r : records) {
    for (double v : r.values) {
      append_number(csv, v);
      csv += ',';
    }
    csv += r.ok ? "ok" : (r.diverged ? "diverged" : "failed");
    for (const auto* st : {&r.s_c, &r.s_phi, &r.s_p}) {
      for (double v : {st->mean, st->min, st->max}) {
        csv += ',';
        append_number(csv, v);
      }
    }
    csv += ',';
    csv += r.locked ? (*r.locked ? "1" : "0") : "";
    csv += ',';
    append_number(csv, r.circular_std);
    fmt::format_to(std::back_inserter(csv), ",{},{}\n", r.physicality_warnings, r.directory);
  }
  write_file_atomic(out_dir / "sweep_summary.csv", csv);

  RunManifest m;
  m.kind = "sweep";
  m.name = cfg.base.name;
  m.config = config_to_json(cfg);
  m.code_version = code_version();
  m.directory = out_dir;
  m.outputs["sweep_summary"] = "sweep_summary.csv";
  for (const auto& axis : cfg.axes) {
    m.sweep_params.push_back(axis.param);
  }
  m.points = std::move(records);
  m.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_manifest(m);
  return m;
}

} // namespace optosync
