#include "optosync/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "optosync/errors.hpp"

namespace optosync {

namespace {

struct ParamField {
  const char* name;
  double SystemParams::*member;
};

constexpr std::array<ParamField, 15> kParamFields{{
    {"omega1", &SystemParams::omega1},
    {"omega2", &SystemParams::omega2},
    {"delta1", &SystemParams::delta1},
    {"delta2", &SystemParams::delta2},
    {"g1", &SystemParams::g1},
    {"g2", &SystemParams::g2},
    {"gamma_m1", &SystemParams::gamma_m1},
    {"gamma_m2", &SystemParams::gamma_m2},
    {"kappa1", &SystemParams::kappa1},
    {"kappa2", &SystemParams::kappa2},
    {"tunnel_j", &SystemParams::tunnel_j},
    {"chi_c", &SystemParams::chi_c},
    {"drive1", &SystemParams::drive1},
    {"drive2", &SystemParams::drive2},
    {"n_th", &SystemParams::n_th},
}};

const ParamField* find_param(std::string_view name) {
  for (const auto& f : kParamFields) {
    if (name == f.name) {
      return &f;
    }
  }
  return nullptr;
}

constexpr std::array<const char*, 8> kInitialKeys{
    "initial_q1s", "initial_p1s", "initial_re_a1", "initial_im_a1",
    "initial_q2s", "initial_p2s", "initial_re_a2", "initial_im_a2"};

constexpr std::array<const char*, 17> kOtherKeys{
    "preset",          "name",           "t_end",         "dt",
    "decimate",        "initial_covariance", "phi_mode",  "phi",
    "steady_fraction", "locking_threshold", "output_dir", "seed",
    "sweep_param",     "sweep_values",   "sweep_param2",  "sweep_values2",
    "workers"};

bool is_known_key(std::string_view key) {
  if (find_param(key) != nullptr) {
    return true;
  }
  const auto match = [key](const char* k) { return key == k; };
  return std::any_of(kInitialKeys.begin(), kInitialKeys.end(), match) ||
         std::any_of(kOtherKeys.begin(), kOtherKeys.end(), match);
}

struct Entry {
  std::string value;
  std::size_t line = 0;
  std::size_t value_column = 0;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string where(const std::string& source, std::size_t line, std::size_t column) {
  return fmt::format("{}:{}:{}", source, line, column);
}

double parse_double(const std::string& key, const Entry& e, const std::string& source) {
  double out = 0.0;
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
    throw ConfigError(fmt::format("{}: key '{}': expected a finite number, got '{}'",
                                  where(source, e.line, e.value_column), key, e.value));
  }
  return out;
}

std::uint64_t parse_unsigned(const std::string& key, const Entry& e,
                             const std::string& source) {
  std::uint64_t out = 0;
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(fmt::format("{}: key '{}': expected a non-negative integer, got '{}'",
                                  where(source, e.line, e.value_column), key, e.value));
  }
  return out;
}

std::vector<double> parse_list(const std::string& key, const Entry& e,
                               const std::string& source) {
  std::vector<double> out;
  std::size_t pos = 0;
  const std::string& text = e.value;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto stop = comma == std::string::npos ? text.size() : comma;
    const auto item = trim(std::string_view(text).substr(pos, stop - pos));
    const auto offset = text.find_first_not_of(" \t", pos);
    Entry sub{std::string(item), e.line,
              e.value_column + (offset == std::string::npos ? pos : offset)};
    if (item.empty()) {
      throw ConfigError(fmt::format("{}: key '{}': empty list element",
                                    where(source, sub.line, sub.value_column), key));
    }
    out.push_back(parse_double(key, sub, source));
    if (comma == std::string::npos) {
      break;
    }
    pos = comma + 1;
  }
  return out;
}

ScenarioConfig base_preset_config(const std::string& name, double chi_c, double tunnel_j) {
  ScenarioConfig cfg;
  cfg.name = name;
  cfg.params = SystemParams{};
  cfg.params.chi_c = chi_c;
  cfg.params.tunnel_j = tunnel_j;
  return cfg;
}

} // namespace

bool is_sweepable_param(std::string_view name) {
  return name != "omega1" && find_param(name) != nullptr;
}

double get_param(const SystemParams& params, std::string_view name) {
  const auto* f = find_param(name);
  if (f == nullptr) {
    throw ConfigError(fmt::format("unknown parameter '{}'", name));
  }
  return params.*(f->member);
}

void set_param(SystemParams& params, std::string_view name, double value) {
  const auto* f = find_param(name);
  if (f == nullptr) {
    throw ConfigError(fmt::format("unknown parameter '{}'", name));
  }
  params.*(f->member) = value;
}

std::string to_string(InitialCovariance mode) {
  return mode == InitialCovariance::vacuum ? "vacuum" : "thermal_vacuum";
}

std::string to_string(PhiMode::Kind kind) {
  switch (kind) {
  case PhiMode::Kind::fixed:
    return "fixed";
  case PhiMode::Kind::classical_difference:
    return "classical_difference";
  case PhiMode::Kind::per_resonator:
    return "per_resonator";
  }
  return "classical_difference";
}

void ScenarioConfig::validate() const {
  try {
    params.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (!(t_end > 0.0)) {
    throw ConfigError("t_end must be > 0");
  }
  if (!(dt > 0.0) || dt > t_end) {
    throw ConfigError("dt must be > 0 and <= t_end");
  }
  if (decimate < 1) {
    throw ConfigError("decimate must be >= 1");
  }
  if (!(steady_fraction > 0.0 && steady_fraction <= 1.0)) {
    throw ConfigError("steady_fraction must be in (0, 1]");
  }
  if (!(locking_threshold > 0.0)) {
    throw ConfigError("locking_threshold must be > 0");
  }
  for (double v : initial_state.to_array()) {
    if (!std::isfinite(v)) {
      throw ConfigError("initial state must be finite");
    }
  }
  if (!std::isfinite(phi_mode.phi)) {
    throw ConfigError("phi must be finite");
  }
}

void SweepConfig::validate() const {
  base.validate();
  if (axes.empty() || axes.size() > 2) {
    throw ConfigError("sweep_param: a sweep needs one or two swept parameters");
  }
  for (const auto& axis : axes) {
    if (!is_sweepable_param(axis.param)) {
      throw ConfigError(fmt::format("sweep_param: '{}' is not a sweepable parameter", axis.param));
    }
    if (axis.values.empty()) {
      throw ConfigError(fmt::format("sweep_values: no values given for '{}'", axis.param));
    }
    for (double v : axis.values) {
      SystemParams p = base.params;
      set_param(p, axis.param, v);
      try {
        p.validate();
      } catch (const DomainError& e) {
        throw ConfigError(fmt::format("sweep_values: {} = {}: {}", axis.param, v, e.what()));
      }
    }
  }
  if (axes.size() == 2 && axes[0].param == axes[1].param) {
    throw ConfigError("sweep_param2: must differ from sweep_param");
  }
  if (workers < 1) {
    throw ConfigError("workers must be >= 1");
  }
}

std::vector<std::string> preset_names() {
  return {"fig2a", "fig2c", "fig3a", "fig3b", "fig4", "fig5",
          "fig6",  "fig7",  "fig8sweep", "vacuum-null", "red-detuned"};
}

LoadedConfig preset(const std::string& name) {
  if (name == "fig2a" || name == "fig3a") {
    return base_preset_config(name, 0.4, 0.02);
  }
  if (name == "fig2c" || name == "fig3b") {
    return base_preset_config(name, 0.0, 0.02);
  }
  if (name == "fig4") {
    return base_preset_config(name, 0.6, 0.0);
  }
  if (name == "fig5") {
    return base_preset_config(name, 0.6, 0.02);
  }
  if (name == "fig6") {
    return base_preset_config(name, 0.0, 0.02);
  }
  if (name == "fig7") {
    auto cfg = base_preset_config(name, 0.6, 0.02);
    cfg.params.n_th = 0.0;
    return cfg;
  }
  if (name == "fig8sweep") {
    SweepConfig sweep;
    sweep.base = base_preset_config(name, 0.0, 0.02);
    sweep.base.params.n_th = 0.0;
    sweep.axes = {{"chi_c", {0.0, 0.2, 0.4, 0.6}}};
    sweep.workers = 4;
    return sweep;
  }
  if (name == "vacuum-null") {
    ScenarioConfig cfg;
    cfg.name = name;
    auto& p = cfg.params;
    p.g1 = p.g2 = 0.0;
    p.tunnel_j = 0.0;
    p.chi_c = 0.0;
    p.drive1 = p.drive2 = 0.0;
    cfg.t_end = 200.0;
    return cfg;
  }
  if (name == "red-detuned") {
    // Stable linear-response point: red detuning and weak drive.
    auto cfg = base_preset_config(name, 0.4, 0.02);
    cfg.params.delta1 = cfg.params.omega1;
    cfg.params.delta2 = cfg.params.omega2;
    cfg.params.drive1 = cfg.params.drive2 = 10.0;
    return cfg;
  }
  throw ConfigError(fmt::format("unknown preset '{}'", name));
}

LoadedConfig parse_config(std::string_view text, const std::string& source) {
  std::map<std::string, Entry> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    if (!trim(line).empty()) {
      const auto eq = line.find('=');
      const auto key_col = line.find_first_not_of(" \t") + 1;
      if (eq == std::string_view::npos) {
        throw ConfigError(fmt::format("{}: expected 'key = value'",
                                      where(source, line_no, key_col)));
      }
      const std::string key(trim(line.substr(0, eq)));
      if (key.empty()) {
        throw ConfigError(fmt::format("{}: missing key before '='",
                                      where(source, line_no, eq + 1)));
      }
      const auto value_part = line.substr(eq + 1);
      const auto value_off = value_part.find_first_not_of(" \t");
      const std::string value(trim(value_part));
      if (value.empty()) {
        throw ConfigError(fmt::format("{}: key '{}' has no value",
                                      where(source, line_no, eq + 2), key));
      }
      if (!is_known_key(key)) {
        throw ConfigError(fmt::format("{}: unknown key '{}'",
                                      where(source, line_no, key_col), key));
      }
      if (entries.count(key) != 0) {
        throw ConfigError(fmt::format("{}: duplicate key '{}'",
                                      where(source, line_no, key_col), key));
      }
      entries[key] = Entry{value, line_no, eq + 2 + value_off};
    }
    if (nl == std::string_view::npos) {
      break;
    }
    pos = nl + 1;
  }

  const auto take = [&entries](const char* key) -> std::optional<Entry> {
    auto it = entries.find(key);
    if (it == entries.end()) {
      return std::nullopt;
    }
    return it->second;
  };

  ScenarioConfig cfg;
  std::vector<SweepAxis> axes;
  std::size_t workers = 1;
  if (auto e = take("preset")) {
    LoadedConfig base;
    try {
      base = preset(e->value);
    } catch (const ConfigError&) {
      throw ConfigError(fmt::format("{}: key 'preset': unknown preset '{}'",
                                    where(source, e->line, e->value_column), e->value));
    }
    if (auto* s = std::get_if<ScenarioConfig>(&base)) {
      cfg = *s;
    } else {
      auto& sw = std::get<SweepConfig>(base);
      cfg = sw.base;
      axes = sw.axes;
      workers = sw.workers;
    }
  }

  for (const auto& field : kParamFields) {
    if (auto e = take(field.name)) {
      cfg.params.*(field.member) = parse_double(field.name, *e, source);
    }
  }
  {
    auto state = cfg.initial_state.to_array();
    for (std::size_t k = 0; k < kInitialKeys.size(); ++k) {
      if (auto e = take(kInitialKeys[k])) {
        state[k] = parse_double(kInitialKeys[k], *e, source);
      }
    }
    cfg.initial_state = ClassicalState::from_array(state);
  }
  if (auto e = take("name")) cfg.name = e->value;
  if (auto e = take("t_end")) cfg.t_end = parse_double("t_end", *e, source);
  if (auto e = take("dt")) cfg.dt = parse_double("dt", *e, source);
  if (auto e = take("decimate")) {
    cfg.decimate = static_cast<std::size_t>(parse_unsigned("decimate", *e, source));
  }
  if (auto e = take("initial_covariance")) {
    if (e->value == "thermal_vacuum") {
      cfg.initial_covariance = InitialCovariance::thermal_vacuum;
    } else if (e->value == "vacuum") {
      cfg.initial_covariance = InitialCovariance::vacuum;
    } else {
      throw ConfigError(fmt::format(
          "{}: key 'initial_covariance': expected thermal_vacuum or vacuum, got '{}'",
          where(source, e->line, e->value_column), e->value));
    }
  }
  if (auto e = take("phi_mode")) {
    if (e->value == "fixed") {
      cfg.phi_mode.kind = PhiMode::Kind::fixed;
    } else if (e->value == "classical_difference") {
      cfg.phi_mode.kind = PhiMode::Kind::classical_difference;
    } else if (e->value == "per_resonator") {
      cfg.phi_mode.kind = PhiMode::Kind::per_resonator;
    } else {
      throw ConfigError(fmt::format(
          "{}: key 'phi_mode': expected fixed, classical_difference or per_resonator, got '{}'",
          where(source, e->line, e->value_column), e->value));
    }
  }
  if (auto e = take("phi")) cfg.phi_mode.phi = parse_double("phi", *e, source);
  if (auto e = take("steady_fraction")) {
    cfg.steady_fraction = parse_double("steady_fraction", *e, source);
  }
  if (auto e = take("locking_threshold")) {
    cfg.locking_threshold = parse_double("locking_threshold", *e, source);
  }
  if (auto e = take("output_dir")) cfg.output_dir = e->value;
  if (auto e = take("seed")) cfg.seed = parse_unsigned("seed", *e, source);

  const auto p1 = take("sweep_param");
  const auto v1 = take("sweep_values");
  const auto p2 = take("sweep_param2");
  const auto v2 = take("sweep_values2");
  const auto w = take("workers");
  if (p1 || v1) {
    if (!p1 || !v1) {
      throw ConfigError("sweep_param and sweep_values must be given together");
    }
    axes.clear();
    axes.push_back({p1->value, parse_list("sweep_values", *v1, source)});
  }
  if (p2 || v2) {
    if (!p2 || !v2) {
      throw ConfigError("sweep_param2 and sweep_values2 must be given together");
    }
    if (axes.empty()) {
      throw ConfigError("sweep_param2 requires sweep_param");
    }
    axes.resize(1);
    axes.push_back({p2->value, parse_list("sweep_values2", *v2, source)});
  }
  if (w) {
    workers = static_cast<std::size_t>(parse_unsigned("workers", *w, source));
  }

  if (axes.empty()) {
    if (w) {
      throw ConfigError("workers is only valid in a sweep configuration");
    }
    cfg.validate();
    return cfg;
  }
  SweepConfig sweep{cfg, axes, workers};
  sweep.validate();
  return sweep;
}

LoadedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

std::string defaults_text() {
  const ScenarioConfig cfg;
  std::string out;
  out += "# Defaults (all rates in units of omega1; time tau = omega1 t).\n";
  out += "# System parameters default to the fig2a preset.\n";
  for (const auto& f : kParamFields) {
    out += fmt::format("{} = {}\n", f.name, cfg.params.*(f.member));
  }
  out += fmt::format("t_end = {}\n", cfg.t_end);
  out += fmt::format("dt = {}\n", cfg.dt);
  out += fmt::format("decimate = {}\n", cfg.decimate);
  for (const char* key : kInitialKeys) {
    out += fmt::format("{} = 0\n", key);
  }
  out += "initial_covariance = thermal_vacuum   # or vacuum\n";
  out += "phi_mode = classical_difference       # or fixed, per_resonator\n";
  out += fmt::format("phi = {}                                # used when phi_mode = fixed\n",
                     cfg.phi_mode.phi);
  out += fmt::format("steady_fraction = {}\n", cfg.steady_fraction);
  out += fmt::format("locking_threshold = {}\n", cfg.locking_threshold);
  out += "# output_dir = <dir>                  # default: out/<name>\n";
  out += fmt::format("seed = {}                               # reserved\n", cfg.seed);
  out += "name = custom\n";
  out += "# preset = <name>                     # start from a built-in preset\n";
  out += "# Sweep keys:\n";
  out += "# sweep_param = chi_c\n";
  out += "# sweep_values = 0, 0.2, 0.4, 0.6\n";
  out += "# sweep_param2 = <name>\n";
  out += "# sweep_values2 = <v1>, <v2>, ...\n";
  out += "# workers = 1\n";
  out += "# Presets:";
  for (const auto& p : preset_names()) {
    out += " " + p;
  }
  out += "\n";
  return out;
}

} // namespace optosync
