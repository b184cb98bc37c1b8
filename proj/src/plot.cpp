#include "optosync/plot.hpp"

#include <fmt/format.h>

#include "optosync/errors.hpp"

namespace optosync {

namespace fs = std::filesystem;

namespace {

constexpr const char* kHeader =
    "set datafile separator ','\n"
    "set key autotitle columnhead\n"
    "set grid\n";

void require_file(const fs::path& dir, const std::string& name) {
  if (!fs::exists(dir / name)) {
    throw Error(fmt::format("missing output file '{}'", (dir / name).string()));
  }
}

std::string terminal(const std::string& stem) {
  return fmt::format("set terminal pngcairo size 1200,800\nset output '{}.png'\n", stem);
}

fs::path emit(const fs::path& dir, const std::string& stem, const std::string& body) {
  const fs::path path = dir / (stem + ".gp");
  write_file_atomic(path, std::string(kHeader) + terminal(stem) + body);
  return path;
}

} // namespace

std::vector<fs::path> emit_plot_scripts(const RunManifest& manifest) {
  const fs::path& dir = manifest.directory;
  std::vector<fs::path> written;

  if (manifest.kind == "sweep") {
    require_file(dir, "sweep_summary.csv");
    const std::string param = manifest.sweep_params.empty() ? "value" : manifest.sweep_params[0];
    written.push_back(emit(dir, "sweep_summary", fmt::format(
        "set xlabel '{0}'\n"
        "set ylabel 'steady-window mean'\n"
        "plot 'sweep_summary.csv' using (column('{0}')):(column('mean_S_p')) "
        "with linespoints title 'mean_S_p', \\\n"
        "     '' using (column('{0}')):(column('mean_S_c')) with linespoints title 'mean_S_c', \\\n"
        "     '' using (column('{0}')):(column('mean_S_phi')) with linespoints title 'mean_S_phi'\n",
        param)));

    std::string body = "set xlabel 'tau'\nset ylabel 'S_p'\nplot ";
    bool first = true;
    for (const auto& p : manifest.points) {
      if (!fs::exists(dir / p.directory / "sync.csv")) {
        continue;
      }
      std::string label;
      for (std::size_t a = 0; a < p.values.size() && a < manifest.sweep_params.size(); ++a) {
        label += fmt::format("{}{}={}", a ? " " : "", manifest.sweep_params[a], p.values[a]);
      }
      body += fmt::format("{}'{}/sync.csv' using (column('tau')):(column('S_p')) "
                          "with lines title '{}'",
                          first ? "" : ", \\\n     ", p.directory, label);
      first = false;
    }
    body += "\n";
    if (!first) {
      written.push_back(emit(dir, "sweep_sync", body));
    }
    return written;
  }

  for (const auto& [label, file] : manifest.outputs) {
    require_file(dir, file);
  }
  if (manifest.outputs.count("classical") == 0) {
    throw Error(fmt::format("missing output file '{}'", (dir / "classical.csv").string()));
  }

  written.push_back(emit(dir, "mean_values",
      "set multiplot layout 2,1\n"
      "set xlabel 'tau'\n"
      "plot 'classical.csv' using (column('tau')):(column('q1s')) with lines title 'q1s', \\\n"
      "     '' using (column('tau')):(column('q2s')) with lines dt 2 title 'q2s'\n"
      "plot 'classical.csv' using (column('tau')):(column('p1s')) with lines title 'p1s', \\\n"
      "     '' using (column('tau')):(column('p2s')) with lines dt 2 title 'p2s'\n"
      "unset multiplot\n"));

  written.push_back(emit(dir, "phase_space",
      "set xlabel 'q_s'\nset ylabel 'p_s'\n"
      "plot 'classical.csv' using (column('q1s')):(column('p1s')) with lines title 'resonator 1', \\\n"
      "     '' using (column('q2s')):(column('p2s')) with lines title 'resonator 2'\n"));

  written.push_back(emit(dir, "cavity_quadratures",
      "set multiplot layout 2,1\n"
      "set xlabel 'tau'\n"
      "plot 'classical.csv' using (column('tau')):(sqrt(2)*column('re_a1')) with lines title 'x1', \\\n"
      "     '' using (column('tau')):(sqrt(2)*column('re_a2')) with lines dt 2 title 'x2'\n"
      "plot 'classical.csv' using (column('tau')):(sqrt(2)*column('im_a1')) with lines title 'y1', \\\n"
      "     '' using (column('tau')):(sqrt(2)*column('im_a2')) with lines dt 2 title 'y2'\n"
      "unset multiplot\n"));

  if (manifest.outputs.count("sync") != 0) {
    written.push_back(emit(dir, "sync",
        "set multiplot layout 3,1\n"
        "set xlabel 'tau'\n"
        "plot 'sync.csv' using (column('tau')):(column('S_c')) with lines title 'S_c'\n"
        "plot 'sync.csv' using (column('tau')):(column('S_phi')) with lines title 'S_phi'\n"
        "plot 'sync.csv' using (column('tau')):(column('S_p')) with lines title 'S_p'\n"
        "unset multiplot\n"));
  }
  return written;
}

} // namespace optosync
