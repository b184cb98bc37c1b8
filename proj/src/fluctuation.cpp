#include "optosync/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "optosync/errors.hpp"
#include "optosync/matrix_kernels.hpp"
#include "optosync/rk4.hpp"

namespace optosync {

namespace {

constexpr std::size_t kN = quad::kDim;
constexpr std::size_t kClassical = 8;
constexpr std::size_t kState = kClassical + kN * kN;

using State = detail::Vec<kState>;

// X = A V, out = X + X^T + D
void lyapunov_into(const double* v, const double* a, const double* d, double* out) {
  double x[kN * kN];
  for (std::size_t i = 0; i < kN; ++i) {
    for (std::size_t j = 0; j < kN; ++j) {
      x[i * kN + j] = 0.0;
    }
    for (std::size_t k = 0; k < kN; ++k) {
      const double aik = a[i * kN + k];
      if (aik == 0.0) {
        continue;
      }
      for (std::size_t j = 0; j < kN; ++j) {
        x[i * kN + j] += aik * v[k * kN + j];
      }
    }
  }
  for (std::size_t i = 0; i < kN; ++i) {
    for (std::size_t j = 0; j < kN; ++j) {
      out[i * kN + j] = x[i * kN + j] + x[j * kN + i] + d[i * kN + j];
    }
  }
}

void symmetrize(double* v) {
  for (std::size_t i = 0; i < kN; ++i) {
    for (std::size_t j = i + 1; j < kN; ++j) {
      const double m = 0.5 * (v[i * kN + j] + v[j * kN + i]);
      v[i * kN + j] = m;
      v[j * kN + i] = m;
    }
  }
}

} // namespace

Matrix Matrix8::to_matrix() const {
  Matrix m(kN);
  for (std::size_t i = 0; i < kN; ++i) {
    for (std::size_t j = 0; j < kN; ++j) {
      m(i, j) = (*this)(i, j);
    }
  }
  return m;
}

Matrix8 Matrix8::from_matrix(const Matrix& m) {
  if (m.size() != kN) {
    throw DomainError("Matrix8: expected an 8x8 matrix");
  }
  Matrix8 out;
  for (std::size_t i = 0; i < kN; ++i) {
    for (std::size_t j = 0; j < kN; ++j) {
      out(i, j) = m(i, j);
    }
  }
  return out;
}

double Matrix8::max_asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < kN; ++i) {
    for (std::size_t j = i + 1; j < kN; ++j) {
      worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
    }
  }
  return worst;
}

DriftMatrix build_drift(const SystemParams& prm, const ClassicalState& s) {
  using namespace quad;
  const auto [det1, det2] = effective_detuning(prm, s.q1s, s.q2s);
  const auto [big_g1, big_g2] = effective_coupling(prm, s.alpha1, s.alpha2);
  const double re1 = std::numbers::sqrt2 * big_g1.real();
  const double im1 = std::numbers::sqrt2 * big_g1.imag();
  const double re2 = std::numbers::sqrt2 * big_g2.real();
  const double im2 = std::numbers::sqrt2 * big_g2.imag();

  DriftMatrix a;
  a(q1, p1) = prm.omega1;

  a(p1, q1) = -prm.omega1;
  a(p1, p1) = -prm.gamma_m1;
  a(p1, x1) = re1;
  a(p1, y1) = im1;
  a(p1, q2) = -prm.chi_c;

  a(x1, q1) = -im1;
  a(x1, x1) = -prm.kappa1;
  a(x1, y1) = det1;
  a(x1, y2) = prm.tunnel_j;

  a(y1, q1) = re1;
  a(y1, x1) = -det1;
  a(y1, y1) = -prm.kappa1;
  a(y1, x2) = -prm.tunnel_j;

  a(q2, p2) = prm.omega2;

  a(p2, q1) = -prm.chi_c;
  a(p2, q2) = -prm.omega2;
  a(p2, p2) = -prm.gamma_m2;
  a(p2, x2) = re2;
  a(p2, y2) = im2;

  a(x2, y1) = prm.tunnel_j;
  a(x2, q2) = -im2;
  a(x2, x2) = -prm.kappa2;
  a(x2, y2) = det2;

  a(y2, x1) = -prm.tunnel_j;
  a(y2, q2) = re2;
  a(y2, x2) = -det2;
  a(y2, y2) = -prm.kappa2;
  return a;
}

DiffusionMatrix build_diffusion(const SystemParams& prm) {
  using namespace quad;
  DiffusionMatrix d;
  d(p1, p1) = prm.gamma_m1 * (2.0 * prm.n_th + 1.0);
  d(x1, x1) = prm.kappa1;
  d(y1, y1) = prm.kappa1;
  d(p2, p2) = prm.gamma_m2 * (2.0 * prm.n_th + 1.0);
  d(x2, x2) = prm.kappa2;
  d(y2, y2) = prm.kappa2;
  return d;
}

Matrix8 lyapunov_rhs(const Matrix8& v, const Matrix8& a, const Matrix8& d) {
  Matrix8 out;
  lyapunov_into(v.data().data(), a.data().data(), d.data().data(), out.data().data());
  return out;
}

CovarianceMatrix default_initial_covariance(const SystemParams& prm) {
  if (!(prm.n_th >= 0.0)) {
    throw DomainError("default_initial_covariance: n_th must be >= 0");
  }
  CovarianceMatrix v;
  for (std::size_t i = 0; i < kN; ++i) {
    v(i, i) = quad::is_mechanical(i) ? prm.n_th + 0.5 : 0.5;
  }
  return v;
}

double min_symplectic_eigenvalue(const CovarianceMatrix& v) {
  try {
    const auto nu = symplectic_eigenvalues(v.to_matrix());
    return *std::min_element(nu.begin(), nu.end());
  } catch (const DomainError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

std::size_t CoupledTrajectory::warning_count() const {
  return static_cast<std::size_t>(
      std::count(physicality_warning.begin(), physicality_warning.end(), true));
}

CoupledRun integrate_coupled_partial(const SystemParams& params,
                                     const ClassicalState& initial_state,
                                     const CovarianceMatrix& initial_v, double t_end,
                                     double dt, std::size_t decimate) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw DomainError("dt must be > 0");
  }
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw DomainError("t_end must be > 0");
  }
  if (decimate < 1) {
    throw DomainError("decimate must be >= 1");
  }
  if (initial_v.max_asymmetry() > 1e-12) {
    throw DomainError("integrate_coupled: initial covariance is not symmetric");
  }
  const double nu0 = min_symplectic_eigenvalue(initial_v);
  if (!(nu0 >= 0.5 - kPhysicalityTolerance)) {
    throw DomainError("integrate_coupled: initial covariance is not physical");
  }

  const DiffusionMatrix diffusion = build_diffusion(params);
  auto rhs = [&params, &diffusion](const State& y, State& dy) {
    std::array<double, kClassical> cls;
    std::copy_n(y.begin(), kClassical, cls.begin());
    std::array<double, kClassical> dcls;
    classical_rhs(cls, params, dcls);
    std::copy_n(dcls.begin(), kClassical, dy.begin());
    const DriftMatrix a = build_drift(params, ClassicalState::from_array(cls));
    lyapunov_into(y.data() + kClassical, a.data().data(), diffusion.data().data(),
                  dy.data() + kClassical);
  };

  State y{};
  {
    const auto c = initial_state.to_array();
    std::copy(c.begin(), c.end(), y.begin());
    std::copy(initial_v.data().begin(), initial_v.data().end(), y.begin() + kClassical);
  }

  CoupledRun run;
  auto& traj = run.trajectory;
  traj.classical.decimate = decimate;

  PhasePair phase = mechanical_phase(initial_state);
  double dphi_wrapped = wrap_angle(phase.phi1 - phase.phi2);
  double dphi = dphi_wrapped;

  auto store = [&](double t) {
    std::array<double, kClassical> cls;
    std::copy_n(y.begin(), kClassical, cls.begin());
    CovarianceMatrix v;
    std::copy_n(y.begin() + kClassical, kN * kN, v.data().begin());
    const double nu = min_symplectic_eigenvalue(v);
    traj.classical.times.push_back(t);
    traj.classical.states.push_back(ClassicalState::from_array(cls));
    traj.classical.phases.push_back(phase);
    traj.classical.dphi_unwrapped.push_back(dphi);
    traj.covariances.push_back(v);
    traj.min_symplectic.push_back(nu);
    traj.physicality_warning.push_back(!(nu >= 0.5 - kPhysicalityTolerance));
  };
  store(0.0);

  const auto steps = detail::step_count(t_end, dt);
  for (std::int64_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double h = (k + 1 == steps) ? t_end - t : dt;
    State next = detail::rk4_step<kState>(rhs, y, h);
    if (!detail::all_finite(next)) {
      run.diverged_at = t;
      return run;
    }
    symmetrize(next.data() + kClassical);
    y = next;
    phase = mechanical_phase(ClassicalState::from_array(
        {y[0], y[1], y[2], y[3], y[4], y[5], y[6], y[7]}));
    const double wrapped = wrap_angle(phase.phi1 - phase.phi2);
    dphi += wrap_angle(wrapped - dphi_wrapped);
    dphi_wrapped = wrapped;
    if ((k + 1) % static_cast<std::int64_t>(decimate) == 0 || k + 1 == steps) {
      store(k + 1 == steps ? t_end : static_cast<double>(k + 1) * dt);
    }
  }
  return run;
}

CoupledTrajectory integrate_coupled(const SystemParams& params,
                                    const ClassicalState& initial_state,
                                    const CovarianceMatrix& initial_v, double t_end,
                                    double dt, std::size_t decimate) {
  auto run = integrate_coupled_partial(params, initial_state, initial_v, t_end, dt, decimate);
  if (run.diverged_at) {
    throw IntegrationDiverged("integrate_coupled: non-finite state at tau = " +
                                  std::to_string(*run.diverged_at),
                              *run.diverged_at);
  }
  return std::move(run.trajectory);
}

std::vector<CovarianceMatrix> integrate_frozen_covariance(const Matrix8& a,
                                                          const Matrix8& d,
                                                          const CovarianceMatrix& initial_v,
                                                          const std::vector<double>& checkpoints,
                                                          double dt) {
  if (!(dt > 0.0)) {
    throw DomainError("dt must be > 0");
  }
  using V = detail::Vec<kN * kN>;
  auto rhs = [&a, &d](const V& v, V& dv) {
    lyapunov_into(v.data(), a.data().data(), d.data().data(), dv.data());
  };
  V v = initial_v.data();
  std::vector<CovarianceMatrix> out;
  out.reserve(checkpoints.size());
  double t = 0.0;
  for (double target : checkpoints) {
    if (!(target > t) && !(target == t && !out.empty())) {
      throw DomainError("integrate_frozen_covariance: checkpoints must ascend from > 0");
    }
    const double span = target - t;
    const auto steps = span > 0.0 ? detail::step_count(span, dt) : 0;
    for (std::int64_t k = 0; k < steps; ++k) {
      const double h = (k + 1 == steps) ? span - static_cast<double>(k) * dt : dt;
      v = detail::rk4_step<kN * kN>(rhs, v, h);
      symmetrize(v.data());
    }
    if (!detail::all_finite(v)) {
      throw IntegrationDiverged("integrate_frozen_covariance: non-finite covariance", t);
    }
    t = target;
    CovarianceMatrix snap;
    snap.data() = v;
    out.push_back(snap);
  }
  return out;
}

} // namespace optosync
