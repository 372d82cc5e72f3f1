// Independent closed forms used as test oracles. Nothing here calls into the
// library's numerical code paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "dtnf/core/params.hpp"

namespace oracle {

using Exact = boost::multiprecision::cpp_rational;

/// Phi(m, n) with every term in exact rationals; lambda and gamma are taken
/// as their decimal values p/10^k.
inline double phi_exact(int m, int n, int M, int M_alpha, const Exact& lambda, const Exact& gamma) {
  Exact sum = 0;
  for (int j = m; j < M_alpha; ++j) sum += Exact(1) / (lambda * (n + j) * (n + j + 1) * (M - j));
  return static_cast<double>(sum - gamma);
}

/// Delay under never-copy: sum of independent exponential holding times with
/// rates lambda (m + N0)(M - m), m < M_alpha.
inline double never_copy_mean_delay(const dtnf::NetworkParams& p) {
  long double s = 0;
  for (int m = 0; m < p.M_alpha(); ++m) s += 1.0L / (static_cast<long double>(p.lambda) * (m + p.N0) * (p.M - m));
  return static_cast<double>(s);
}

inline double never_copy_delay_variance(const dtnf::NetworkParams& p) {
  long double s = 0;
  for (int m = 0; m < p.M_alpha(); ++m) {
    const long double r = static_cast<long double>(p.lambda) * (m + p.N0) * (p.M - m);
    s += 1.0L / (r * r);
  }
  return static_cast<double>(s);
}

/// Never-copy total cost: delay plus gamma for each of the M destination copies.
inline double never_copy_total_cost(const dtnf::NetworkParams& p) { return never_copy_mean_delay(p) + p.gamma * p.M; }

/// Integral of dz / ((y + z)^2 (X - z)) over [x, X_alpha] by adaptive
/// Gauss-Kronrod.
inline double phi_integral_quadrature(double x, double y, double X, double X_alpha) {
  if (x >= X_alpha) return 0.0;
  auto f = [&](double z) { return 1.0 / ((y + z) * (y + z) * (X - z)); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, x, X_alpha, 15, 1e-14, &err);
}

/// Time for x to go from x0 to X_alpha with y frozen, by quadrature.
inline double frozen_delay_quadrature(double x0, double y, double X, double X_alpha, double Lambda) {
  auto f = [&](double z) { return 1.0 / ((y + z) * (X - z)); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, x0, X_alpha, 15, 1e-14, &err) / Lambda;
}

/// Uncontrolled epidemic from (0, Y0): s = x + y is logistic and
/// X - x = X / D, Y - y = (Y - Y0) / D with D = 1 - Y0 + Y0 e^{Lambda t}.
struct Logistic {
  double X, Y, Y0, Lambda;
  double D(double t) const { return 1.0 - Y0 + Y0 * std::exp(Lambda * t); }
  double x(double t) const { return X - X / D(t); }
  double y(double t) const { return Y - (Y - Y0) / D(t); }
};

/// Two-sided Kolmogorov-Smirnov statistic of a sample against Exponential(rate).
inline double ks_exponential(std::vector<double> sample, double rate) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double F = 1.0 - std::exp(-rate * sample[i]);
    d = std::max({d, (i + 1) / n - F, F - i / n});
  }
  return d;
}

/// Asymptotic 1% critical value of the two-sided KS statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

/// [lo, hi] such that (n - 1) s^2 / sigma^2 lies in the central 99% of
/// chi-square(n - 1) iff s^2 / sigma^2 is in [lo, hi].
inline std::pair<double, double> variance_ratio_bracket_99(std::size_t n) {
  const boost::math::chi_squared dist(static_cast<double>(n - 1));
  const double df = static_cast<double>(n - 1);
  return {boost::math::quantile(dist, 0.005) / df, boost::math::quantile(dist, 0.995) / df};
}

}  // namespace oracle
