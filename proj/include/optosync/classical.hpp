#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "optosync/core_model.hpp"

namespace optosync {

/// Mean values of the two mechanical resonators and two cavity fields.
struct ClassicalState {
  double q1s = 0.0;
  double p1s = 0.0;
  std::complex<double> alpha1{};
  double q2s = 0.0;
  double p2s = 0.0;
  std::complex<double> alpha2{};

  /// (q1s, p1s, Re a1, Im a1, q2s, p2s, Re a2, Im a2)
  std::array<double, 8> to_array() const;
  static ClassicalState from_array(const std::array<double, 8>& y);

  friend bool operator==(const ClassicalState&, const ClassicalState&) = default;
};

struct PhasePair {
  double phi1 = 0.0;
  double phi2 = 0.0;
};

struct ClassicalTrajectory {
  std::vector<double> times;
  std::vector<ClassicalState> states;
  std::vector<PhasePair> phases;
  /// phi1 - phi2 accumulated step by step from principal-value increments.
  std::vector<double> dphi_unwrapped;
  std::size_t decimate = 1;

  std::size_t size() const noexcept { return times.size(); }
};

/// Time derivative of the mean-field equations.
ClassicalState classical_rhs(const ClassicalState& state, const SystemParams& params);

/// Same equations on the flat 8-vector layout of ClassicalState::to_array.
void classical_rhs(const std::array<double, 8>& y, const SystemParams& params,
                   std::array<double, 8>& dy);

/// Fixed-step RK4 from tau = 0 to t_end. Every `decimate`-th step is
/// stored, plus the final state. Throws IntegrationDiverged on a
/// non-finite state.
ClassicalTrajectory integrate_classical(const SystemParams& params,
                                        const ClassicalState& initial, double t_end,
                                        double dt, std::size_t decimate);

/// atan2(p_js, q_js) in (-pi, pi]; the origin maps to 0.
PhasePair mechanical_phase(const ClassicalState& state);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

struct PhaseLocking {
  double mean_dphi = 0.0;      // circular mean
  double circular_std = 0.0;   // sqrt(-2 ln R)
  double drift = 0.0;          // unwrapped change across the window
  bool locked = false;
};

/// Circular statistics of phi1 - phi2 over the trailing `window_fraction`
/// of stored samples. Throws InsufficientData below 10 samples.
PhaseLocking phase_locking_metric(const ClassicalTrajectory& traj,
                                  double window_fraction, double threshold = 0.1);

struct OrbitSummary {
  double amplitude = 0.0;            // max sqrt(q^2 + p^2) in the window
  double period = 0.0;               // mean spacing of upward zero crossings of q
  double cycle_amplitude_variation = 0.0; // (max - min) / mean of per-cycle peaks
  std::size_t cycles = 0;
  bool closed_orbit = false;
};

struct LimitCycleSummary {
  OrbitSummary resonator1;
  OrbitSummary resonator2;
};

/// Orbit statistics over the trailing window. Throws InsufficientData if
/// either resonator completes fewer than 3 full cycles in the window.
LimitCycleSummary limit_cycle_summary(const ClassicalTrajectory& traj,
                                      double window_fraction,
                                      double closed_tolerance = 0.02);

/// First index of the trailing `fraction` of `n` samples.
std::size_t window_start(std::size_t n, double fraction);

} // namespace optosync
