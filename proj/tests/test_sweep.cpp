#include <gtest/gtest.h>

#include "dtnf/fluid/sweep.hpp"

using namespace dtnf;

namespace {

ScaledParams base(double Gamma = 50) { return ScaledParams::fluid_only(0.2, 0.8, 0.2, Rational(4, 5), 0.05, Gamma); }

}  // namespace

TEST(Sweep, MinimiserIsStopTime) {
  for (const Relaying mode : {Relaying::epidemic, Relaying::two_hop}) {
    const ScaledParams s = base();
    const FluidSolution sol = integrate(s, mode);
    const SweepResult r = pontryagin_sweep(s, mode, sol.tau / 1000.0);
    EXPECT_LE(std::abs(r.argmin - sol.tau_star), r.refined_step) << to_string(mode);
    const double fluid = fluid_cost(sol).relay_cost;
    EXPECT_LT(std::abs(r.min_cost - fluid) / fluid, 1e-6);
    EXPECT_TRUE(r.g_increasing);
    EXPECT_LE(std::abs(r.g_zero - sol.tau_star), r.refined_step);
  }
}

TEST(Sweep, ThresholdCostMatchesDirectIntegration) {
  // C(t) from the sweep against integrating with copying cut at t.
  const ScaledParams s = base();
  const SweepResult r = pontryagin_sweep(s, Relaying::epidemic, 1.0, 1);
  for (const std::size_t k : {std::size_t{0}, std::size_t{10}, std::size_t{34}, std::size_t{50}}) {
    const SweepRow& row = r.coarse[k];
    const FluidSolution sol = integrate_controlled(s, Relaying::epidemic, row.threshold);
    const double direct = sol.tau + s.Gamma * sol.y_at_tau_star;
    EXPECT_NEAR(row.cost, direct, 1e-7 * direct) << row.threshold;
  }
}

TEST(Sweep, CostSlopeIsRelayRateTimesG) {
  const ScaledParams s = base();
  const SweepResult r = pontryagin_sweep(s, Relaying::epidemic, 0.01, 1);
  const FluidDrift f{&s, Relaying::epidemic};
  for (std::size_t k = 100; k + 1 < r.coarse.size(); k += 900) {
    const auto& a = r.coarse[k - 1];
    const auto& b = r.coarse[k + 1];
    const double slope = (b.cost - a.cost) / (b.threshold - a.threshold);
    const auto& mid = r.coarse[k];
    const double want = f(mid.x_bar, mid.y_bar, true).second * mid.g;
    EXPECT_NEAR(slope, want, 1e-4 * std::max(1.0, std::abs(want)));
  }
}

TEST(Sweep, ImmediateStop) {
  const ScaledParams s = base(1e6);
  const SweepResult r = pontryagin_sweep(s, Relaying::epidemic, 0.1);
  EXPECT_EQ(r.argmin, 0.0);
  EXPECT_EQ(r.g_zero, 0.0);
}

TEST(Sweep, RejectsBadSteps) {
  EXPECT_THROW(pontryagin_sweep(base(), Relaying::epidemic, 0.0), ParamError);
  EXPECT_THROW(pontryagin_sweep(base(), Relaying::epidemic, 1.0, 0), ParamError);
}
