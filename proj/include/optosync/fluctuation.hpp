#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "optosync/classical.hpp"
#include "optosync/core_model.hpp"
#include "optosync/matrix.hpp"

namespace optosync {

/// 8x8 row-major block indexed through the quadrature ordering.
class Matrix8 {
public:
  static constexpr std::size_t kN = quad::kDim;

  double& operator()(std::size_t i, std::size_t j) { return data_[i * kN + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * kN + j]; }

  std::array<double, kN * kN>& data() noexcept { return data_; }
  const std::array<double, kN * kN>& data() const noexcept { return data_; }

  Matrix to_matrix() const;
  static Matrix8 from_matrix(const Matrix& m);
  /// max |M - M^T|
  double max_asymmetry() const;

  friend bool operator==(const Matrix8&, const Matrix8&) = default;

private:
  std::array<double, kN * kN> data_{};
};

class DriftMatrix : public Matrix8 {};

/// Diagonal noise injection; off-diagonal entries stay zero.
class DiffusionMatrix : public Matrix8 {};

/// V_ij = <z_i z_j + z_j z_i> / 2 in the quadrature ordering.
class CovarianceMatrix : public Matrix8 {
public:
  CovarianceMatrix() = default;
  explicit CovarianceMatrix(const Matrix8& m) : Matrix8(m) {}
  static CovarianceMatrix from_matrix(const Matrix& m) {
    return CovarianceMatrix(Matrix8::from_matrix(m));
  }
};

/// Linearized drift around the given mean values.
DriftMatrix build_drift(const SystemParams& params, const ClassicalState& state);

/// diag(0, gamma_m1 (2 n_th + 1), kappa1, kappa1, 0, gamma_m2 (2 n_th + 1), kappa2, kappa2)
DiffusionMatrix build_diffusion(const SystemParams& params);

/// A V + V A^T + D. Computed as X + X^T + D with X = A V, so the result
/// is exactly symmetric whenever V is.
Matrix8 lyapunov_rhs(const Matrix8& v, const Matrix8& a, const Matrix8& d);

/// Thermal mechanical state (n_th + 1/2 on q, p) with vacuum cavities (1/2).
CovarianceMatrix default_initial_covariance(const SystemParams& params);

/// Smallest symplectic eigenvalue, or NaN when V is not positive definite.
double min_symplectic_eigenvalue(const CovarianceMatrix& v);

inline constexpr double kPhysicalityTolerance = 1e-9;

struct CoupledTrajectory {
  ClassicalTrajectory classical;
  std::vector<CovarianceMatrix> covariances;
  std::vector<double> min_symplectic;
  /// true where min_symplectic < 1/2 - kPhysicalityTolerance (or NaN).
  std::vector<bool> physicality_warning;

  std::size_t size() const noexcept { return classical.size(); }
  std::size_t warning_count() const;
};

/// A coupled run that may have stopped early.
struct CoupledRun {
  CoupledTrajectory trajectory;
  /// Set when integration met a non-finite value; holds the step start time.
  std::optional<double> diverged_at;
};

/// RK4 co-integration of the mean-field equations and the covariance ODE
/// as one 72-variable system. The drift matrix is rebuilt from the
/// stage-local mean values at every stage; V is symmetrized after every
/// step. Throws IntegrationDiverged on non-finite values and DomainError
/// for an unphysical initial_v.
CoupledTrajectory integrate_coupled(const SystemParams& params,
                                    const ClassicalState& initial_state,
                                    const CovarianceMatrix& initial_v, double t_end,
                                    double dt, std::size_t decimate);

/// As integrate_coupled, but returns the stored prefix on divergence.
CoupledRun integrate_coupled_partial(const SystemParams& params,
                                     const ClassicalState& initial_state,
                                     const CovarianceMatrix& initial_v, double t_end,
                                     double dt, std::size_t decimate);

/// RK4 of dV/dt = A V + V A^T + D with A held constant. Returns V at
/// each requested checkpoint (ascending, > 0); checkpoints are hit exactly.
std::vector<CovarianceMatrix> integrate_frozen_covariance(const Matrix8& a,
                                                          const Matrix8& d,
                                                          const CovarianceMatrix& initial_v,
                                                          const std::vector<double>& checkpoints,
                                                          double dt);

} // namespace optosync
