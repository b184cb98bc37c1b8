#include "optosync/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "optosync/errors.hpp"
#include "optosync/rk4.hpp"

namespace optosync {

std::array<double, 8> ClassicalState::to_array() const {
  return {q1s, p1s, alpha1.real(), alpha1.imag(),
          q2s, p2s, alpha2.real(), alpha2.imag()};
}

ClassicalState ClassicalState::from_array(const std::array<double, 8>& y) {
  return {y[0], y[1], {y[2], y[3]}, y[4], y[5], {y[6], y[7]}};
}

void classical_rhs(const std::array<double, 8>& y, const SystemParams& prm,
                   std::array<double, 8>& dy) {
  const double q1 = y[0], p1 = y[1], ar1 = y[2], ai1 = y[3];
  const double q2 = y[4], p2 = y[5], ar2 = y[6], ai2 = y[7];
  const double det1 = prm.delta1 - prm.g1 * q1;
  const double det2 = prm.delta2 - prm.g2 * q2;

  dy[0] = prm.omega1 * p1;
  dy[1] = -prm.omega1 * q1 + prm.g1 * (ar1 * ar1 + ai1 * ai1) - prm.chi_c * q2 -
          prm.gamma_m1 * p1;
  // -(i det + kappa) alpha - i J alpha_other + drive
  dy[2] = -prm.kappa1 * ar1 + det1 * ai1 + prm.tunnel_j * ai2 + prm.drive1;
  dy[3] = -prm.kappa1 * ai1 - det1 * ar1 - prm.tunnel_j * ar2;

  dy[4] = prm.omega2 * p2;
  dy[5] = -prm.omega2 * q2 + prm.g2 * (ar2 * ar2 + ai2 * ai2) - prm.chi_c * q1 -
          prm.gamma_m2 * p2;
  dy[6] = -prm.kappa2 * ar2 + det2 * ai2 + prm.tunnel_j * ai1 + prm.drive2;
  dy[7] = -prm.kappa2 * ai2 - det2 * ar2 - prm.tunnel_j * ar1;
}

ClassicalState classical_rhs(const ClassicalState& state, const SystemParams& params) {
  std::array<double, 8> dy{};
  classical_rhs(state.to_array(), params, dy);
  return ClassicalState::from_array(dy);
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) {
    a += 2.0 * std::numbers::pi;
  }
  return a;
}

namespace {

double phase_of(double q, double p) {
  if (q == 0.0 && p == 0.0) {
    return 0.0;
  }
  const double phi = std::atan2(p, q);
  return phi == -std::numbers::pi ? std::numbers::pi : phi;
}

void validate_step_args(double t_end, double dt, std::size_t decimate) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw DomainError("dt must be > 0");
  }
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw DomainError("t_end must be > 0");
  }
  if (decimate < 1) {
    throw DomainError("decimate must be >= 1");
  }
}

} // namespace

PhasePair mechanical_phase(const ClassicalState& s) {
  return {phase_of(s.q1s, s.p1s), phase_of(s.q2s, s.p2s)};
}

ClassicalTrajectory integrate_classical(const SystemParams& params,
                                        const ClassicalState& initial, double t_end,
                                        double dt, std::size_t decimate) {
  validate_step_args(t_end, dt, decimate);
  const auto steps = detail::step_count(t_end, dt);

  ClassicalTrajectory traj;
  traj.decimate = decimate;
  const auto expected = static_cast<std::size_t>(steps) / decimate + 2;
  traj.times.reserve(expected);
  traj.states.reserve(expected);
  traj.phases.reserve(expected);
  traj.dphi_unwrapped.reserve(expected);

  auto rhs = [&params](const detail::Vec<8>& y, detail::Vec<8>& dy) {
    classical_rhs(y, params, dy);
  };

  detail::Vec<8> y = initial.to_array();
  PhasePair phase = mechanical_phase(initial);
  double dphi_wrapped = wrap_angle(phase.phi1 - phase.phi2);
  double dphi = dphi_wrapped;

  auto store = [&](double t, const detail::Vec<8>& state) {
    traj.times.push_back(t);
    traj.states.push_back(ClassicalState::from_array(state));
    traj.phases.push_back(phase);
    traj.dphi_unwrapped.push_back(dphi);
  };
  store(0.0, y);

  for (std::int64_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double h = (k + 1 == steps) ? t_end - t : dt;
    y = detail::rk4_step<8>(rhs, y, h);
    if (!detail::all_finite(y)) {
      throw IntegrationDiverged(
          "integrate_classical: non-finite state at tau = " + std::to_string(t), t);
    }
    phase = mechanical_phase(ClassicalState::from_array(y));
    const double next = wrap_angle(phase.phi1 - phase.phi2);
    dphi += wrap_angle(next - dphi_wrapped);
    dphi_wrapped = next;
    if ((k + 1) % static_cast<std::int64_t>(decimate) == 0 || k + 1 == steps) {
      store(k + 1 == steps ? t_end : static_cast<double>(k + 1) * dt, y);
    }
  }
  return traj;
}

std::size_t window_start(std::size_t n, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw DomainError("window fraction must be in (0, 1]");
  }
  const auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  return n - std::min(count, n);
}

PhaseLocking phase_locking_metric(const ClassicalTrajectory& traj,
                                  double window_fraction, double threshold) {
  const std::size_t n = traj.size();
  const std::size_t start = window_start(n, window_fraction);
  if (n - start < 10) {
    throw InsufficientData("phase_locking_metric: fewer than 10 samples in window");
  }
  double sum_cos = 0.0;
  double sum_sin = 0.0;
  for (std::size_t k = start; k < n; ++k) {
    sum_cos += std::cos(traj.dphi_unwrapped[k]);
    sum_sin += std::sin(traj.dphi_unwrapped[k]);
  }
  const double count = static_cast<double>(n - start);
  const double resultant = std::hypot(sum_cos, sum_sin) / count;

  PhaseLocking out;
  out.mean_dphi = std::atan2(sum_sin, sum_cos);
  out.circular_std = resultant >= 1.0 ? 0.0 : std::sqrt(-2.0 * std::log(resultant));
  out.drift = traj.dphi_unwrapped[n - 1] - traj.dphi_unwrapped[start];
  out.locked = out.circular_std < threshold;
  return out;
}

namespace {

OrbitSummary summarize_orbit(const std::vector<double>& t, const std::vector<double>& q,
                             const std::vector<double>& p, double closed_tolerance,
                             const char* label) {
  OrbitSummary out;
  std::vector<double> crossing_times;
  std::vector<std::size_t> crossing_index;
  for (std::size_t k = 0; k < q.size(); ++k) {
    out.amplitude = std::max(out.amplitude, std::hypot(q[k], p[k]));
    if (k > 0 && q[k - 1] < 0.0 && q[k] >= 0.0) {
      const double frac = -q[k - 1] / (q[k] - q[k - 1]);
      crossing_times.push_back(t[k - 1] + frac * (t[k] - t[k - 1]));
      crossing_index.push_back(k);
    }
  }
  if (crossing_times.size() < 4) {
    throw InsufficientData(std::string("limit_cycle_summary: fewer than 3 full cycles for ") +
                           label);
  }
  out.cycles = crossing_times.size() - 1;
  out.period = (crossing_times.back() - crossing_times.front()) /
               static_cast<double>(out.cycles);

  std::vector<double> peaks;
  peaks.reserve(out.cycles);
  for (std::size_t c = 0; c + 1 < crossing_index.size(); ++c) {
    double peak = 0.0;
    for (std::size_t k = crossing_index[c]; k < crossing_index[c + 1]; ++k) {
      peak = std::max(peak, std::hypot(q[k], p[k]));
    }
    peaks.push_back(peak);
  }
  const auto [lo, hi] = std::minmax_element(peaks.begin(), peaks.end());
  double mean = 0.0;
  for (double v : peaks) {
    mean += v;
  }
  mean /= static_cast<double>(peaks.size());
  out.cycle_amplitude_variation = mean > 0.0 ? (*hi - *lo) / mean : 0.0;
  out.closed_orbit = out.cycle_amplitude_variation < closed_tolerance;
  return out;
}

} // namespace

LimitCycleSummary limit_cycle_summary(const ClassicalTrajectory& traj,
                                      double window_fraction, double closed_tolerance) {
  const std::size_t n = traj.size();
  if (n == 0) {
    throw InsufficientData("limit_cycle_summary: empty trajectory");
  }
  const std::size_t start = window_start(n, window_fraction);
  std::vector<double> t, q1, p1, q2, p2;
  for (std::size_t k = start; k < n; ++k) {
    t.push_back(traj.times[k]);
    q1.push_back(traj.states[k].q1s);
    p1.push_back(traj.states[k].p1s);
    q2.push_back(traj.states[k].q2s);
    p2.push_back(traj.states[k].p2s);
  }
  return {summarize_orbit(t, q1, p1, closed_tolerance, "resonator 1"),
          summarize_orbit(t, q2, p2, closed_tolerance, "resonator 2")};
}

} // namespace optosync
