#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace optosync::detail {

template <std::size_t N>
using Vec = std::array<double, N>;

/// One classical fourth-order Runge-Kutta step of size h.
template <std::size_t N, typename Rhs>
Vec<N> rk4_step(const Rhs& rhs, const Vec<N>& y, double h) {
  Vec<N> k1, k2, k3, k4, tmp;
  rhs(y, k1);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  rhs(tmp, k2);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  rhs(tmp, k3);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * k3[i];
  rhs(tmp, k4);
  Vec<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

template <std::size_t N>
bool all_finite(const Vec<N>& y) {
  double s = 0.0;
  for (double v : y) s += v;
  return std::isfinite(s);
}

/// Number of fixed steps needed to reach t_end; the last one may be short.
inline std::int64_t step_count(double t_end, double dt) {
  const double ratio = t_end / dt;
  const auto n = static_cast<std::int64_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(n)) <= 1e-9 * ratio) {
    return n;
  }
  return static_cast<std::int64_t>(std::ceil(ratio));
}

} // namespace optosync::detail
