#pragma once

#include <cstddef>
#include <vector>

#include "optosync/fluctuation.hpp"

namespace optosync {

/// Complete synchronization <q_-^2 + p_-^2>^{-1} from the mechanical
/// block of V. Returns +infinity when the denominator is below 1e-12 in
/// magnitude; throws NonphysicalCovariance when it is more negative.
double sync_complete(const CovarianceMatrix& v);

/// Complete synchronization with subsystem 2 offset by a fixed phase phi.
/// sync_phi(v, 0) == sync_complete(v) bit for bit.
double sync_phi(const CovarianceMatrix& v, double phi);

/// Phase synchronization: inverse variance of p'_1 - p'_2, where each
/// resonator's quadratures are rotated by its own classical phase.
double sync_phase(const CovarianceMatrix& v, double phi1, double phi2);

/// R V R^T with R rotating each mechanical (q, p) pair by phi_j:
/// q' = q cos phi + p sin phi, p' = p cos phi - q sin phi.
CovarianceMatrix rotate_mechanical(const CovarianceMatrix& v, double phi1, double phi2);

/// How S_c^phi picks its phase at each sample.
struct PhiMode {
  enum class Kind {
    fixed,                // the constant `phi`
    classical_difference, // phi1(tau) - phi2(tau)
    per_resonator,        // S_c evaluated in the frame co-rotating with each phase
  };
  Kind kind = Kind::classical_difference;
  double phi = 0.0;
};

struct SyncSample {
  double tau = 0.0;
  double s_c = 0.0;
  double s_phi = 0.0;
  double s_p = 0.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double dphi_unwrapped = 0.0;
  double min_symplectic = 0.0;
  /// Any measure hit the +infinity underflow policy.
  bool saturated = false;
};

struct MeasureStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct SyncSeries {
  std::vector<SyncSample> samples;
  double window_fraction = 0.5;
  MeasureStats s_c;
  MeasureStats s_phi;
  MeasureStats s_p;
};

/// Evaluates every measure at every snapshot and aggregates the trailing
/// `window_fraction` of samples.
SyncSeries sync_series(const CoupledTrajectory& traj, const PhiMode& mode = {},
                       double window_fraction = 0.5);

/// Aggregates of the three measures over the trailing `window_fraction`.
void aggregate_window(SyncSeries& series, double window_fraction);

} // namespace optosync
