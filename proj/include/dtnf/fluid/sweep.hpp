#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "dtnf/fluid/integrate.hpp"
#include "dtnf/fluid/phi.hpp"

namespace dtnf {

struct SweepRow {
  double threshold = 0.0;
  double x_bar = 0.0;
  double y_bar = 0.0;
  /// C(t) = t + Gamma * y_bar + remaining delay with y frozen at y_bar.
  double cost = 0.0;
  /// g(t) = Gamma - (1/Lambda) * integral of dz / ((z + y_bar)^2 (X - z)); dC/dt = y' g.
  double g = 0.0;
};

struct SweepResult {
  double argmin = 0.0;
  double min_cost = 0.0;
  double coarse_step = 0.0;
  double refined_step = 0.0;
  /// Grid point where g first becomes >= 0 on the refined grid.
  double g_zero = 0.0;
  bool g_increasing = true;
  std::vector<SweepRow> coarse;
  std::vector<SweepRow> refined;
};

namespace detail {

// Uncontrolled (always-copy) states at t = 0, dt, 2 dt, ... until x >= X_alpha
// or `count` points, whichever comes first; RK4 sub-steps no larger than `h`.
inline std::vector<SweepRow> sweep_rows(const ScaledParams& s, Relaying mode, double t0, State start, double dt,
                                        std::size_t count, double h) {
  const FluidDrift f{&s, mode};
  const int sub = std::max(1, static_cast<int>(std::ceil(dt / h)));
  const double hs = dt / sub;
  std::vector<SweepRow> out;
  State st = start;
  for (std::size_t k = 0; k < count; ++k) {
    SweepRow row;
    row.threshold = t0 + dt * static_cast<double>(k);
    row.x_bar = st.x;
    row.y_bar = st.y;
    row.cost = row.threshold + s.Gamma * st.y + remaining_delay(st.x, st.y, s);
    row.g = -(phi_integral(st.x, st.y, s) / s.Lambda - s.Gamma);
    out.push_back(row);
    if (st.x >= s.X_alpha) break;
    for (int i = 0; i < sub; ++i) st = rk4(f, st, hs, true);
  }
  return out;
}

inline std::size_t argmin_row(const std::vector<SweepRow>& rows) {
  return static_cast<std::size_t>(std::min_element(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
                                    return a.cost < b.cost;
                                  }) -
                                  rows.begin());
}

}  // namespace detail

/// Direct minimisation of the threshold cost C(t) over t in [0, t_max],
/// where t_max is when the always-copy trajectory reaches X_alpha. A coarse
/// pass with `grid_step` is refined by `refine_factor` on the bracket around
/// the coarse minimiser.
inline SweepResult pontryagin_sweep(const ScaledParams& params, Relaying mode, double grid_step,
                                    int refine_factor = 100) {
  const ScaledParams s = validate(params);
  if (!(grid_step > 0.0)) throw ParamError("pontryagin_sweep: grid_step must be > 0");
  if (refine_factor < 1) throw ParamError("pontryagin_sweep: refine_factor must be >= 1");
  const double h = std::min(default_step(s), grid_step);

  SweepResult r;
  r.coarse_step = grid_step;
  r.coarse = detail::sweep_rows(s, mode, 0.0, {0.0, s.Y0}, grid_step, std::numeric_limits<std::size_t>::max(), h);
  const std::size_t best = detail::argmin_row(r.coarse);

  // Refine over [t_best - step, t_best + step] restarting from the coarse
  // grid state just before the bracket.
  const std::size_t start = best == 0 ? 0 : best - 1;
  const SweepRow& from = r.coarse[start];
  r.refined_step = grid_step / refine_factor;
  const std::size_t span = static_cast<std::size_t>((best == 0 ? 1 : 2) * refine_factor);
  r.refined = detail::sweep_rows(s, mode, from.threshold, {from.x_bar, from.y_bar}, r.refined_step, span + 1,
                                 std::min(h, r.refined_step));
  const std::size_t fine = detail::argmin_row(r.refined);
  r.argmin = r.refined[fine].threshold;
  r.min_cost = r.refined[fine].cost;

  for (const auto* rows : {&r.coarse, &r.refined})
    for (std::size_t k = 1; k < rows->size(); ++k)
      if (!((*rows)[k].g > (*rows)[k - 1].g)) r.g_increasing = false;

  r.g_zero = r.refined.back().threshold;
  if (r.coarse.front().g >= 0.0) {
    r.g_zero = 0.0;
  } else {
    for (const auto& row : r.refined)
      if (row.g >= 0.0) {
        r.g_zero = row.threshold;
        break;
      }
  }
  return r;
}

}  // namespace dtnf
