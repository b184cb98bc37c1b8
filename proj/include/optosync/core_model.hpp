#pragma once

#include <complex>
#include <cstddef>
#include <utility>

namespace optosync {

/// Physical parameters, all expressed as ratios to the first mechanical
/// frequency. Time is measured in tau = omega1 * t.
struct SystemParams {
  double omega1 = 1.0;
  double omega2 = 1.005;
  double delta1 = -1.0;
  double delta2 = -1.005;
  double g1 = 1e-3;
  double g2 = 1e-3;
  double gamma_m1 = 1e-3;
  double gamma_m2 = 1e-3;
  double kappa1 = 0.15;
  double kappa2 = 0.15;
  double tunnel_j = 0.02;
  double chi_c = 0.4;
  double drive1 = 150.0;
  double drive2 = 150.0;
  double n_th = 0.0;

  /// Throws DomainError naming the first offending field.
  void validate() const;

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Index of each quadrature fluctuation in every 8x8 matrix.
/// Mechanical (q, p) precede optical (x, y) within each subsystem.
namespace quad {
inline constexpr std::size_t kDim = 8;
inline constexpr std::size_t q1 = 0;
inline constexpr std::size_t p1 = 1;
inline constexpr std::size_t x1 = 2;
inline constexpr std::size_t y1 = 3;
inline constexpr std::size_t q2 = 4;
inline constexpr std::size_t p2 = 5;
inline constexpr std::size_t x2 = 6;
inline constexpr std::size_t y2 = 7;

inline constexpr bool is_mechanical(std::size_t i) { return (i % 4) < 2; }
} // namespace quad

/// Electrostatic setup of the two charged resonators, in any consistent
/// unit system.
struct CoulombGeometry {
  double c1 = 0.0;
  double c2 = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;
  double r0 = 1.0;
  double eps0 = 1.0;
};

/// chi_c = C1 V1 C2 V2 / (2 pi eps0 r0^3), in the units of the inputs.
double coulomb_coupling(const CoulombGeometry& geom);

/// Delta'_j = Delta_j - g_j q_js.
std::pair<double, double> effective_detuning(const SystemParams& params,
                                             double q1s, double q2s);

/// G_j = g_j alpha_j.
std::pair<std::complex<double>, std::complex<double>>
effective_coupling(const SystemParams& params, std::complex<double> alpha1,
                   std::complex<double> alpha2);

} // namespace optosync
