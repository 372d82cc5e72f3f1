#pragma once

#include <cmath>
#include <string>

#include "dtnf/core/params.hpp"
#include "dtnf/mdp/phi.hpp"

namespace dtnf {

namespace detail {
inline void check_fluid_domain(double x, double y, const ScaledParams& s) {
  constexpr double slack = 1e-12;
  if (!(x >= -slack && x <= s.X + slack && y >= s.Y0 - slack && y <= s.Y + slack))
    throw ParamError("fluid state (" + std::to_string(x) + "," + std::to_string(y) + ") outside [0,X]x[Y0,Y]");
}
}  // namespace detail

/// Integral of dz / ((y+z)^2 (X-z)) over [x, X_alpha], zero when x >= X_alpha.
/// Partial fractions give (1/A^2) log(...) + (1/A)(X_alpha-x)/((y+x)(y+X_alpha))
/// with A = X + y; both terms are nonnegative so nothing cancels.
inline double phi_integral(double x, double y, const ScaledParams& s) {
  if (x >= s.X_alpha) return 0.0;
  const double A = s.X + y;
  const double gap = s.X_alpha - x;
  const double log_term = std::log1p(gap * A / ((y + x) * (s.X - s.X_alpha)));
  return log_term / (A * A) + gap / (A * (y + x) * (y + s.X_alpha));
}

/// Fluid analogue of Phi: integral / Lambda - Gamma; -Gamma once x >= X_alpha.
inline double phi_fluid(double x, double y, const ScaledParams& s) {
  detail::check_fluid_domain(x, y, s);
  return phi_integral(x, y, s) / s.Lambda - s.Gamma;
}

/// Time for x to climb from x_bar to X_alpha with y frozen at y_bar:
/// (1/Lambda) * integral of dz / ((z + y_bar)(X - z)).
inline double remaining_delay(double x_bar, double y_bar, const ScaledParams& s) {
  if (x_bar >= s.X_alpha) return 0.0;
  const double A = s.X + y_bar;
  const double ratio_minus_one = (s.X_alpha - x_bar) * A / ((x_bar + y_bar) * (s.X - s.X_alpha));
  return std::log1p(ratio_minus_one) / (s.Lambda * A);
}

/// Finite-K index on the scaled lattice:
///   sum_{j=Kx}^{ceil(K X_alpha)-1} 1 / (K Lambda (y + j/K)(y + (j+1)/K)(X - j/K)) - Gamma.
/// Equals K * Phi(Kx, Ky) for the network with lambda = Lambda/K, gamma = Gamma/K.
inline double phi_K(double x, double y, const ScaledParams& s, int K) {
  if (K < 1) throw ParamError("phi_K: K must be >= 1");
  auto lattice_index = [&](double v, const char* what) {
    const double scaled = v * K;
    const double r = std::round(scaled);
    if (std::abs(scaled - r) > 1e-9 * std::max(1.0, std::abs(scaled)))
      throw ParamError(std::string("phi_K: ") + what + " is not on the 1/K lattice");
    return static_cast<int>(r);
  };
  const int M = lattice_index(s.X, "X");
  const int N0 = lattice_index(s.Y0, "Y0");
  const int N = K - M;
  const int i = lattice_index(x, "x");
  const int j = lattice_index(y, "y");
  if (i < 0 || i > M - 1 || j < N0 || j > N) throw ParamError("phi_K: point outside Delta^K");
  const int m_alpha = ceil_fraction(s.alpha, M);

  detail::CompensatedSum sum;
  const double k = K;
  const double yk = j / k;
  for (int l = i; l < m_alpha; ++l)
    sum.add(1.0 / (k * s.Lambda * (yk + l / k) * (yk + (l + 1) / k) * (s.X - l / k)));
  return sum.value() - s.Gamma;
}

}  // namespace dtnf
