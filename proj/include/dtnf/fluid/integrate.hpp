#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dtnf/core/params.hpp"
#include "dtnf/fluid/phi.hpp"

namespace dtnf {

struct FluidPoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct IntegratorOptions {
  /// RK4 step; 0 selects min(1e-3 / Lambda, tau_estimate / 1e4).
  double step = 0.0;
  /// Bisection width for event times.
  double event_tolerance = 1e-9;
  /// Keep integrating past tau up to this time (0: stop at tau).
  double horizon = 0.0;
};

/// Fluid drift. Relay infection is switched off by `copying == false`.
struct FluidDrift {
  const ScaledParams* s;
  Relaying mode;

  std::pair<double, double> operator()(double x, double y, bool copying) const {
    const double dx = s->Lambda * (x + y) * (s->X - x);
    if (!copying) return {dx, 0.0};
    const double forwarders = mode == Relaying::epidemic ? x + y : x + s->Y0;
    return {dx, s->Lambda * forwarders * (s->Y - y)};
  }
};

/// Sampled solution of the controlled fluid ODE with its two event times:
/// tau_star, when relay copying stops, and tau, when x reaches X_alpha.
class FluidSolution {
 public:
  ScaledParams params;
  Relaying mode = Relaying::epidemic;
  double step = 0.0;
  double tau_star = 0.0;
  double tau = 0.0;
  double x_at_tau_star = 0.0;
  double y_at_tau_star = 0.0;

  const std::vector<FluidPoint>& trajectory() const { return points_; }
  double end_time() const { return points_.empty() ? 0.0 : points_.back().t; }

  /// Cubic Hermite interpolation between integrator nodes.
  FluidPoint at(double t) const {
    if (points_.empty()) throw std::logic_error("FluidSolution::at on an empty solution");
    if (t < 0.0 || t > end_time() + 1e-12) throw std::out_of_range("FluidSolution::at: t outside [0, end]");
    if (t >= end_time()) return points_.back();
    const auto it = std::upper_bound(points_.begin(), points_.end(), t,
                                     [](double v, const FluidPoint& p) { return v < p.t; });
    const std::size_t hi = static_cast<std::size_t>(it - points_.begin());
    const std::size_t lo = hi - 1;
    const FluidPoint& a = points_[lo];
    const FluidPoint& b = points_[hi];
    const double h = b.t - a.t;
    if (h <= 0.0) return b;
    const double u = (t - a.t) / h;
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    const auto& da = right_[lo];
    const auto& db = left_[hi];
    return {t, h00 * a.x + h10 * h * da.first + h01 * b.x + h11 * h * db.first,
            h00 * a.y + h10 * h * da.second + h01 * b.y + h11 * h * db.second};
  }

  void push(const FluidPoint& p, std::pair<double, double> left, std::pair<double, double> right) {
    points_.push_back(p);
    left_.push_back(left);
    right_.push_back(right);
  }
  void set_right_derivative(std::pair<double, double> d) { right_.back() = d; }

 private:
  std::vector<FluidPoint> points_;
  std::vector<std::pair<double, double>> left_, right_;
};

namespace detail {

struct State {
  double x, y;
};

inline State rk4(const FluidDrift& f, State s, double h, bool copying) {
  const auto k1 = f(s.x, s.y, copying);
  const auto k2 = f(s.x + 0.5 * h * k1.first, s.y + 0.5 * h * k1.second, copying);
  const auto k3 = f(s.x + 0.5 * h * k2.first, s.y + 0.5 * h * k2.second, copying);
  const auto k4 = f(s.x + h * k3.first, s.y + h * k3.second, copying);
  return {s.x + h / 6.0 * (k1.first + 2.0 * k2.first + 2.0 * k3.first + k4.first),
          s.y + h / 6.0 * (k1.second + 2.0 * k2.second + 2.0 * k3.second + k4.second)};
}

// Smallest sub-step in (0, h] (to `tol`) whose end state satisfies `crossed`.
template <class Pred>
double bisect_step(const FluidDrift& f, State s, double h, bool copying, double tol, Pred crossed) {
  double lo = 0.0, hi = h;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (crossed(rk4(f, s, mid, copying)))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

inline double clamp_phi(double x, double y, const ScaledParams& s) {
  return phi_integral(std::clamp(x, 0.0, s.X), std::clamp(y, s.Y0, s.Y), s) / s.Lambda - s.Gamma;
}

}  // namespace detail

inline double default_step(const ScaledParams& s) {
  const double tau_bound = remaining_delay(0.0, s.Y0, s);
  return std::min(1e-3 / s.Lambda, tau_bound / 1e4);
}

/// Integrates the fluid ODE from (0, Y0). Relay copying is on until
///  - `threshold` is empty: the first time phi(x, y) <= 0;
///  - `threshold` is set: the given time (copying on [0, threshold]).
/// Event times are refined by bisection of the RK4 step.
inline FluidSolution integrate_controlled(const ScaledParams& params, Relaying mode,
                                          std::optional<double> threshold, IntegratorOptions options = {}) {
  const ScaledParams s = validate(params);
  if (options.step < 0.0 || !std::isfinite(options.step)) throw ParamError("integrate: step must be >= 0");
  if (!(options.event_tolerance > 0.0)) throw ParamError("integrate: event_tolerance must be > 0");
  if (threshold && !(*threshold >= 0.0)) throw ParamError("integrate: threshold must be >= 0");

  const FluidDrift f{&s, mode};
  FluidSolution sol;
  sol.params = s;
  sol.mode = mode;
  sol.step = options.step > 0.0 ? options.step : default_step(s);
  const double h = sol.step;
  const double tol = options.event_tolerance;

  double t = 0.0;
  detail::State st{0.0, s.Y0};
  bool copying = true;
  bool delivered = false;
  auto stop_now = [&](const detail::State& q) { return detail::clamp_phi(q.x, q.y, s) <= 0.0; };

  if (threshold ? *threshold <= 0.0 : stop_now(st)) copying = false;
  if (!copying) {
    sol.tau_star = 0.0;
    sol.x_at_tau_star = st.x;
    sol.y_at_tau_star = st.y;
  }
  sol.push({t, st.x, st.y}, f(st.x, st.y, copying), f(st.x, st.y, copying));

  const std::size_t max_steps = 100'000'000;
  for (std::size_t iter = 0; iter < max_steps; ++iter) {
    if (delivered && t >= options.horizon) break;
    double hh = h;
    bool hits_threshold = false;
    if (copying && threshold && t + hh >= *threshold) {
      hh = *threshold - t;
      hits_threshold = true;
    }
    detail::State next = detail::rk4(f, st, hh, copying);

    if (copying && !threshold && stop_now(next)) {
      hh = detail::bisect_step(f, st, hh, true, tol, stop_now);
      next = detail::rk4(f, st, hh, true);
      hits_threshold = true;
    }
    if (!delivered && next.x >= s.X_alpha) {
      const double hb = detail::bisect_step(f, st, hh, copying, tol,
                                            [&](const detail::State& q) { return q.x >= s.X_alpha; });
      // Delivery strictly inside the step: stop the step there.
      if (hb < hh - tol) {
        hh = hb;
        next = detail::rk4(f, st, hh, copying);
        hits_threshold = false;
      }
      delivered = true;
      sol.tau = t + hh;
    }

    const auto left = f(next.x, next.y, copying);
    t += hh;
    st = next;
    if (hits_threshold) {
      copying = false;
      sol.tau_star = t;
      sol.x_at_tau_star = st.x;
      sol.y_at_tau_star = st.y;
    }
    sol.push({t, st.x, st.y}, left, f(st.x, st.y, copying));
  }
  if (!delivered) throw std::runtime_error("integrate: x did not reach X_alpha");
  if (copying) {
    // Delivery came first (only possible when the control never switched):
    // phi <= 0 holds from tau on because phi(X_alpha, y) = -Gamma.
    sol.tau_star = sol.tau;
    const FluidPoint p = sol.at(sol.tau);
    sol.x_at_tau_star = p.x;
    sol.y_at_tau_star = p.y;
  }
  return sol;
}

/// Solution under the phi-controlled (optimal) relay rule.
inline FluidSolution integrate(const ScaledParams& params, Relaying mode = Relaying::epidemic,
                               IntegratorOptions options = {}) {
  return integrate_controlled(params, mode, std::nullopt, options);
}

inline double tau_star(const ScaledParams& params, Relaying mode = Relaying::epidemic) {
  return integrate(params, mode).tau_star;
}

inline double tau(const ScaledParams& params, Relaying mode = Relaying::epidemic) {
  return integrate(params, mode).tau;
}

struct FluidCost {
  double tau = 0.0;
  double tau_star = 0.0;
  double y_at_tau_star = 0.0;
  /// tau + Gamma * y(tau_star).
  double relay_cost = 0.0;
  /// Gamma * X: policy-independent destination-copy energy.
  double destination_energy = 0.0;
  /// y(tau_star) - Y0.
  double copies_made = 0.0;
};

inline FluidCost fluid_cost(const FluidSolution& sol) {
  FluidCost c;
  c.tau = sol.tau;
  c.tau_star = sol.tau_star;
  c.y_at_tau_star = sol.y_at_tau_star;
  c.relay_cost = sol.tau + sol.params.Gamma * sol.y_at_tau_star;
  c.destination_energy = sol.params.Gamma * sol.params.X;
  c.copies_made = sol.y_at_tau_star - sol.params.Y0;
  return c;
}

inline FluidCost fluid_cost(const ScaledParams& params, Relaying mode = Relaying::epidemic) {
  return fluid_cost(integrate(params, mode));
}

}  // namespace dtnf
