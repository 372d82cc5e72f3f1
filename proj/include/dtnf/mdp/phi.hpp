#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dtnf/core/lattice.hpp"
#include "dtnf/core/params.hpp"

namespace dtnf {

using ExactRational = boost::multiprecision::cpp_rational;

namespace detail {

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      carry_ += (sum_ - t) + v;
    else
      carry_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline void check_phi_domain(int m, int n, const NetworkParams& p) {
  if (m < 0 || m > p.M - 1 || n < p.N0 || n > p.N)
    throw ParamError("phi: (" + std::to_string(m) + "," + std::to_string(n) + ") outside [0,M-1]x[N0,N]");
}

/// sum_{j=m}^{M_alpha-1} 1 / ((n+j)(n+j+1)(M-j)), compensated.
inline double phi_series(int m, int n, const NetworkParams& p) {
  CompensatedSum sum;
  const int m_alpha = p.M_alpha();
  for (int j = m; j < m_alpha; ++j) {
    const double denom = static_cast<double>(n + j) * static_cast<double>(n + j + 1) * static_cast<double>(p.M - j);
    sum.add(1.0 / denom);
  }
  return sum.value();
}

}  // namespace detail

/// Phi(m, n) evaluated entirely in `Scalar` arithmetic. With ExactRational the
/// result is exact for the binary values of lambda and gamma.
template <class Scalar>
Scalar phi_as(int m, int n, const NetworkParams& p) {
  detail::check_phi_domain(m, n, p);
  Scalar sum = 0;
  const int m_alpha = p.M_alpha();
  for (int j = m; j < m_alpha; ++j) sum += Scalar(1) / (Scalar(n + j) * Scalar(n + j + 1) * Scalar(p.M - j));
  return sum / Scalar(p.lambda) - Scalar(p.gamma);
}

/// Stop-now minus copy-then-stop cost at a relay meeting in state (m, n).
/// Equals -gamma once m >= M_alpha.
inline double phi(int m, int n, const NetworkParams& p) {
  detail::check_phi_domain(m, n, p);
  return detail::phi_series(m, n, p) / p.lambda - p.gamma;
}

/// Exact sign test Phi(m, n) > 0. The floating value decides unless it lies
/// inside its rounding error bound, in which case the sum is redone in exact
/// rationals against lambda * gamma.
inline bool phi_positive(int m, int n, const NetworkParams& p) {
  detail::check_phi_domain(m, n, p);
  if (m >= p.M_alpha()) return false;
  const double series = detail::phi_series(m, n, p);
  const double scaled = series / p.lambda;
  const double value = scaled - p.gamma;
  const double bound = 16.0 * std::numeric_limits<double>::epsilon() * (scaled + p.gamma);
  if (value > bound) return true;
  if (value < -bound) return false;

  ExactRational sum = 0;
  for (int j = m; j < p.M_alpha(); ++j) sum += ExactRational(1, (n + j) * (n + j + 1) * static_cast<long long>(p.M - j));
  return sum > ExactRational(p.lambda) * ExactRational(p.gamma);
}

/// Optimal action: destinations are always copied; a relay is copied iff
/// Phi(m, n) > 0. A no-copy at a relay meeting is a stop: Phi is decreasing in
/// both arguments, so it persists at every successor state.
inline Action optimal_action(const EpidemicState& s, const NetworkParams& p) {
  check_state(s, p);
  if (s.m >= p.M) throw ParamError("optimal_action: m must be < M");
  if (!s.e) throw ParamError("optimal_action: meeting type is required");
  if (*s.e == MeetingType::destination) return Action::copy;
  return phi_positive(s.m, s.n, p) ? Action::copy : Action::no_copy;
}

/// Phi over [0, M-1] x [N0, N] together with the exact copy decision.
class PhiTable {
 public:
  explicit PhiTable(const NetworkParams& params)
      : params_(validate(params)),
        values_(params.M - 1, params.N0, params.N),
        copy_(params.M - 1, params.N0, params.N, 0) {
    for (int m = 0; m < params_.M; ++m)
      for (int n = params_.N0; n <= params_.N; ++n) {
        values_(m, n) = phi(m, n, params_);
        copy_(m, n) = phi_positive(m, n, params_) ? 1 : 0;
      }
  }

  const NetworkParams& params() const { return params_; }
  double value(int m, int n) const { return values_.at(m, n); }
  bool copy(int m, int n) const { return copy_.at(m, n) != 0; }
  const Lattice<double>& values() const { return values_; }

 private:
  NetworkParams params_;
  Lattice<double> values_;
  Lattice<char> copy_;
};

/// Largest n with Phi(m, n) > 0 for each m in [0, M-1]; N0 - 1 when the row
/// has no copy state. Nonincreasing in m.
inline std::vector<int> copy_boundary(const NetworkParams& p) {
  std::vector<int> last(static_cast<std::size_t>(p.M), p.N0 - 1);
  int upper = p.N;
  for (int m = 0; m < p.M; ++m) {
    int n = p.N0 - 1;
    while (n + 1 <= upper && phi_positive(m, n + 1, p)) ++n;
    last[static_cast<std::size_t>(m)] = n;
    upper = std::max(n, p.N0 - 1);
  }
  return last;
}

}  // namespace dtnf
