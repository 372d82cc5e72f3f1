#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "dtnf/core/lattice.hpp"
#include "dtnf/core/params.hpp"
#include "dtnf/mdp/phi.hpp"

namespace dtnf {

struct OpenLoopCost {
  double t_star = 0.0;
  /// E[T_d].
  double delay = 0.0;
  /// E[relay copies], all made on [0, t_star].
  double relay_copies = 0.0;
  /// delay + gamma * (relay_copies + M).
  double total_cost = 0.0;
  /// Uniformization rate and number of Poisson terms kept.
  double rate = 0.0;
  int terms = 0;
};

/// Exact expected cost of the time-threshold policy "copy every relay met at
/// t <= t_star, none after". On [0, t_star] the chain runs with copying on;
/// its transient law and the expected time spent below M_alpha come from
/// uniformization. After t_star relays are frozen and the remaining delay
/// from (m, n) is sum_{j=m}^{M_alpha-1} 1 / (lambda (n+j)(M-j)).
/// `tolerance` bounds the discarded Poisson tail mass.
inline OpenLoopCost open_loop_cost_exact(const NetworkParams& params, double t_star,
                                         Relaying mode = Relaying::epidemic, double tolerance = 1e-14) {
  const NetworkParams p = validate(params);
  if (!(t_star >= 0.0) || !std::isfinite(t_star)) throw ParamError("open_loop_cost_exact: t_star must be >= 0");
  const int m_alpha = p.M_alpha();

  // Lattice m in [0, M], n in [N0, N]; m = M is absorbing.
  Lattice<double> dest(p.M, p.N0, p.N, 0.0), relay(p.M, p.N0, p.N, 0.0);
  double q = 0.0;
  for (int m = 0; m < p.M; ++m)
    for (int n = p.N0; n <= p.N; ++n) {
      const ChannelRates r = channel_rates(m, n, p, mode);
      dest(m, n) = r.destination;
      relay(m, n) = n < p.N ? r.relay : 0.0;
      q = std::max(q, dest(m, n) + relay(m, n));
    }

  auto frozen_delay = [&](int m, int n) {
    detail::CompensatedSum s;
    for (int j = m; j < m_alpha; ++j) s.add(1.0 / (p.lambda * (n + j) * (p.M - j)));
    return s.value();
  };

  OpenLoopCost out;
  out.t_star = t_star;
  out.rate = q;
  Lattice<double> at_t(p.M, p.N0, p.N, 0.0);     // law at t_star
  Lattice<double> occupied(p.M, p.N0, p.N, 0.0);  // integral of the law over [0, t_star]

  if (t_star == 0.0) {
    at_t(0, p.N0) = 1.0;
  } else {
    const double qt = q * t_star;
    Lattice<double> v(p.M, p.N0, p.N, 0.0), next(p.M, p.N0, p.N, 0.0);
    v(0, p.N0) = 1.0;
    // Poisson(qt) weights in log space. P(N > k) is the regularized lower
    // incomplete gamma P(k+1, qt); summing weights instead stalls at rounding
    // level and never meets a tight tolerance.
    for (int k = 0;; ++k) {
      const double w = std::exp(-qt + k * std::log(qt) - std::lgamma(k + 1.0));
      const double tail = boost::math::gamma_p(k + 1.0, qt);
      for (int m = 0; m <= p.M; ++m)
        for (int n = p.N0; n <= p.N; ++n) {
          at_t(m, n) += w * v(m, n);
          occupied(m, n) += tail / q * v(m, n);
        }
      out.terms = k + 1;
      if (k > qt && tail < tolerance) break;
      if (k > 100'000'000) throw std::runtime_error("open_loop_cost_exact: uniformization did not converge");
      // next = v P with P = I + Q / q.
      for (int m = 0; m <= p.M; ++m)
        for (int n = p.N0; n <= p.N; ++n) next(m, n) = 0.0;
      for (int m = 0; m <= p.M; ++m)
        for (int n = p.N0; n <= p.N; ++n) {
          const double mass = v(m, n);
          if (mass == 0.0) continue;
          if (m == p.M) {
            next(m, n) += mass;
            continue;
          }
          const double a = dest(m, n) / q, b = relay(m, n) / q;
          next(m + 1, n) += mass * a;
          if (b > 0.0) next(m, n + 1) += mass * b;
          next(m, n) += mass * (1.0 - a - b);
        }
      std::swap(v, next);
    }
  }

  detail::CompensatedSum delay, copies;
  for (int m = 0; m <= p.M; ++m)
    for (int n = p.N0; n <= p.N; ++n) {
      if (m < m_alpha) delay.add(occupied(m, n));
      const double mass = at_t(m, n);
      if (mass == 0.0) continue;
      copies.add(mass * (n - p.N0));
      if (m < m_alpha) delay.add(mass * frozen_delay(m, n));
    }
  out.delay = delay.value();
  out.relay_copies = copies.value();
  out.total_cost = out.delay + p.gamma * (out.relay_copies + p.M);
  return out;
}

}  // namespace dtnf
