#include "optosync/sync_measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "optosync/classical.hpp"
#include "optosync/errors.hpp"

namespace optosync {

namespace {

constexpr double kUnderflow = 1e-12;

double invert_denominator(double denom) {
  if (std::abs(denom) < kUnderflow) {
    return std::numeric_limits<double>::infinity();
  }
  if (!(denom > 0.0)) {
    throw NonphysicalCovariance("synchronization denominator is not positive");
  }
  return 1.0 / denom;
}

double mechanical_trace(const CovarianceMatrix& v) {
  using namespace quad;
  return v(q1, q1) + v(p1, p1) + v(q2, q2) + v(p2, p2);
}

} // namespace

double sync_complete(const CovarianceMatrix& v) {
  using namespace quad;
  const double denom = mechanical_trace(v) - 2.0 * (v(q1, q2) + v(p1, p2));
  return invert_denominator(0.5 * denom);
}

double sync_phi(const CovarianceMatrix& v, double phi) {
  using namespace quad;
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  const double denom = mechanical_trace(v) + 2.0 * (v(p1, q2) - v(q1, p2)) * s -
                       2.0 * (v(p1, p2) + v(q1, q2)) * c;
  return invert_denominator(0.5 * denom);
}

double sync_phase(const CovarianceMatrix& v, double phi1, double phi2) {
  using namespace quad;
  const double s1 = std::sin(phi1);
  const double c1 = std::cos(phi1);
  const double s2 = std::sin(phi2);
  const double c2 = std::cos(phi2);
  const double denom = v(q1, q1) * s1 * s1 + v(p1, p1) * c1 * c1 +
                       v(q2, q2) * s2 * s2 + v(p2, p2) * c2 * c2 -
                       2.0 * v(q1, p1) * c1 * s1 - 2.0 * v(q1, q2) * s1 * s2 +
                       2.0 * v(q1, p2) * s1 * c2 + 2.0 * v(p1, q2) * c1 * s2 -
                       2.0 * v(p1, p2) * c1 * c2 - 2.0 * v(q2, p2) * c2 * s2;
  return invert_denominator(denom);
}

CovarianceMatrix rotate_mechanical(const CovarianceMatrix& v, double phi1, double phi2) {
  Matrix r = Matrix::identity(quad::kDim);
  const auto place = [&r](std::size_t q, std::size_t p, double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    r(q, q) = c;
    r(q, p) = s;
    r(p, q) = -s;
    r(p, p) = c;
  };
  place(quad::q1, quad::p1, phi1);
  place(quad::q2, quad::p2, phi2);
  const Matrix m = v.to_matrix();
  CovarianceMatrix out = CovarianceMatrix::from_matrix(r * m * r.transpose());
  // restore exact symmetry lost to rounding in the triple product
  for (std::size_t i = 0; i < quad::kDim; ++i) {
    for (std::size_t j = i + 1; j < quad::kDim; ++j) {
      const double mean = 0.5 * (out(i, j) + out(j, i));
      out(i, j) = mean;
      out(j, i) = mean;
    }
  }
  return out;
}

void aggregate_window(SyncSeries& series, double window_fraction) {
  series.window_fraction = window_fraction;
  const std::size_t n = series.samples.size();
  if (n == 0) {
    throw InsufficientData("sync_series: empty trajectory");
  }
  const std::size_t start = window_start(n, window_fraction);
  const auto stats = [&](auto field) {
    MeasureStats st{0.0, std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity()};
    for (std::size_t k = start; k < n; ++k) {
      const double x = field(series.samples[k]);
      st.mean += x;
      st.min = std::min(st.min, x);
      st.max = std::max(st.max, x);
    }
    st.mean /= static_cast<double>(n - start);
    return st;
  };
  series.s_c = stats([](const SyncSample& s) { return s.s_c; });
  series.s_phi = stats([](const SyncSample& s) { return s.s_phi; });
  series.s_p = stats([](const SyncSample& s) { return s.s_p; });
}

SyncSeries sync_series(const CoupledTrajectory& traj, const PhiMode& mode,
                       double window_fraction) {
  const auto& cls = traj.classical;
  if (cls.size() == 0) {
    throw InsufficientData("sync_series: empty trajectory");
  }
  SyncSeries series;
  series.samples.reserve(cls.size());
  for (std::size_t k = 0; k < cls.size(); ++k) {
    const auto& v = traj.covariances[k];
    const auto& ph = cls.phases[k];
    SyncSample s;
    s.tau = cls.times[k];
    s.phi1 = ph.phi1;
    s.phi2 = ph.phi2;
    s.dphi_unwrapped = cls.dphi_unwrapped[k];
    s.min_symplectic = traj.min_symplectic[k];
    s.s_c = sync_complete(v);
    switch (mode.kind) {
    case PhiMode::Kind::fixed:
      s.s_phi = sync_phi(v, mode.phi);
      break;
    case PhiMode::Kind::classical_difference:
      s.s_phi = sync_phi(v, ph.phi1 - ph.phi2);
      break;
    case PhiMode::Kind::per_resonator:
      s.s_phi = sync_phi(rotate_mechanical(v, ph.phi1, ph.phi2), 0.0);
      break;
    }
    s.s_p = sync_phase(v, ph.phi1, ph.phi2);
    s.saturated = std::isinf(s.s_c) || std::isinf(s.s_phi) || std::isinf(s.s_p);
    series.samples.push_back(s);
  }
  aggregate_window(series, window_fraction);
  return series;
}

} // namespace optosync
