#include "optosync/core_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "optosync/errors.hpp"

namespace optosync {

namespace {

void require_finite(const char* name, double v) {
  if (!std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be finite");
  }
}

void require_non_negative(const char* name, double v) {
  require_finite(name, v);
  if (v < 0.0) {
    throw DomainError(std::string(name) + " must be >= 0");
  }
}

} // namespace

void SystemParams::validate() const {
  if (omega1 != 1.0) {
    throw DomainError("omega1 must be exactly 1 (all rates are in units of omega1)");
  }
  require_non_negative("omega2", omega2);
  require_non_negative("kappa1", kappa1);
  require_non_negative("kappa2", kappa2);
  require_non_negative("gamma_m1", gamma_m1);
  require_non_negative("gamma_m2", gamma_m2);
  require_non_negative("n_th", n_th);
  require_finite("delta1", delta1);
  require_finite("delta2", delta2);
  require_finite("g1", g1);
  require_finite("g2", g2);
  require_finite("tunnel_j", tunnel_j);
  require_finite("chi_c", chi_c);
  require_finite("drive1", drive1);
  require_finite("drive2", drive2);
}

double coulomb_coupling(const CoulombGeometry& geom) {
  if (!(geom.r0 > 0.0)) {
    throw DomainError("coulomb_coupling: r0 must be > 0");
  }
  if (!(geom.eps0 > 0.0)) {
    throw DomainError("coulomb_coupling: eps0 must be > 0");
  }
  const double charge1 = geom.c1 * geom.v1;
  const double charge2 = geom.c2 * geom.v2;
  return charge1 * charge2 /
         (2.0 * std::numbers::pi * geom.eps0 * geom.r0 * geom.r0 * geom.r0);
}

std::pair<double, double> effective_detuning(const SystemParams& params,
                                             double q1s, double q2s) {
  return {params.delta1 - params.g1 * q1s, params.delta2 - params.g2 * q2s};
}

std::pair<std::complex<double>, std::complex<double>>
effective_coupling(const SystemParams& params, std::complex<double> alpha1,
                   std::complex<double> alpha2) {
  return {params.g1 * alpha1, params.g2 * alpha2};
}

} // namespace optosync
