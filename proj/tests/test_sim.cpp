#include <gtest/gtest.h>

#include "dtnf/exp/studies.hpp"
#include "dtnf/mdp/evaluate.hpp"
#include "dtnf/mdp/policy_map.hpp"
#include "dtnf/sim/gillespie.hpp"
#include "dtnf/sim/monte_carlo.hpp"
#include "oracles.hpp"

using namespace dtnf;

namespace {

NetworkParams reference() { return {15, 50, 10, Rational(4, 5), 0.001, 1.0}; }

bool same(const SampleStats& a, const SampleStats& b) {
  return a.count == b.count && a.mean == b.mean && a.variance == b.variance && a.ci_low == b.ci_low &&
         a.ci_high == b.ci_high;
}

}  // namespace

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  SplitMix64 a(replication_seed(1, 0)), b(replication_seed(1, 0)), c(replication_seed(1, 1));
  EXPECT_EQ(a(), b());
  EXPECT_NE(a(), c());
  SplitMix64 u(42);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Simulate, Deterministic) {
  const auto a = monte_carlo(reference(), OptimalClosedLoop{}, Relaying::epidemic, 500, 9, {}, 1);
  const auto b = monte_carlo(reference(), OptimalClosedLoop{}, Relaying::epidemic, 500, 9, {}, 3);
  EXPECT_TRUE(same(a.total_cost, b.total_cost));
  EXPECT_TRUE(same(a.delay, b.delay));
  const auto c = monte_carlo(reference(), OptimalClosedLoop{}, Relaying::epidemic, 500, 10, {}, 1);
  EXPECT_FALSE(same(a.total_cost, c.total_cost));
}

TEST(Simulate, ReportBookkeeping) {
  const NetworkParams p = reference();
  SimOptions o;
  o.record_trajectory = true;
  const RunReport r = simulate(p, AlwaysCopy{}, Relaying::epidemic, 5, o);
  EXPECT_EQ(r.dest_copies, p.M);
  EXPECT_EQ(r.dest_copies_at_T_d, p.M_alpha());
  EXPECT_DOUBLE_EQ(r.total_cost, r.T_d + p.gamma * (r.relay_copies + p.M));
  EXPECT_DOUBLE_EQ(r.relay_energy_cost, r.T_d + p.gamma * (p.N0 + r.relay_copies));
  EXPECT_LE(r.T_d, r.completion_time);
  int m = 0, n = p.N0;
  double t = 0.0;
  for (const SimEvent& e : r.trajectory) {
    EXPECT_GE(e.t, t);
    EXPECT_GE(e.m, m);
    EXPECT_GE(e.n, n);
    t = e.t;
    m = e.m;
    n = e.n;
  }
  EXPECT_EQ(m, p.M);
  EXPECT_EQ(n - p.N0, r.relay_copies);

  SimOptions truncated;
  truncated.run_to_full_delivery = false;
  const RunReport s = simulate(p, AlwaysCopy{}, Relaying::epidemic, 5, truncated);
  EXPECT_EQ(s.dest_copies, p.M_alpha());
  EXPECT_DOUBLE_EQ(s.T_d, s.completion_time);
}

TEST(Simulate, FirstHoldingTimeIsExponential) {
  const NetworkParams p = reference();
  const Simulator sim(p, AlwaysCopy{});
  SimOptions o;
  o.record_trajectory = true;
  o.run_to_full_delivery = false;
  std::vector<double> first;
  for (std::size_t rep = 0; rep < 10000; ++rep) first.push_back(sim.run(77, rep, o).trajectory.front().t);
  const double rate = p.lambda * p.N0 * (p.M + p.N - p.N0);
  EXPECT_LT(oracle::ks_exponential(first, rate), oracle::ks_critical_1pct(first.size()));
}

TEST(Simulate, NeverCopyDelayMatchesClosedForm) {
  const NetworkParams p = reference();
  const auto st = monte_carlo(p, NeverCopy{}, Relaying::epidemic, 10000, 21);
  EXPECT_LT(std::abs(st.delay.mean - oracle::never_copy_mean_delay(p)), 3 * st.delay.std_error);
  EXPECT_EQ(st.relay_copies.mean, 0.0);
}

TEST(Simulate, OptimalCostMatchesExactEvaluator) {
  const NetworkParams p = reference();
  const auto st = monte_carlo(p, OptimalClosedLoop{}, Relaying::epidemic, 10000, 22);
  EXPECT_LT(std::abs(st.total_cost.mean - total_cost(OptimalClosedLoop{}, p)), 3 * st.total_cost.std_error);
}

TEST(Simulate, TwoHopOptimalCostMatchesExactEvaluator) {
  const NetworkParams p = reference();
  const auto st = monte_carlo(p, OptimalClosedLoop{}, Relaying::two_hop, 10000, 23);
  EXPECT_LT(std::abs(st.total_cost.mean - total_cost(OptimalClosedLoop{}, p, Relaying::two_hop)),
            3 * st.total_cost.std_error);
}

TEST(Simulate, OptimalDominatesBeyondConfidenceIntervals) {
  const NetworkParams p = reference();
  const auto opt = monte_carlo(p, OptimalClosedLoop{}, Relaying::epidemic, 10000, 24);
  const auto all = monte_carlo(p, AlwaysCopy{}, Relaying::epidemic, 10000, 25);
  const auto none = monte_carlo(p, NeverCopy{}, Relaying::epidemic, 10000, 26);
  EXPECT_LT(opt.total_cost.ci_high, all.total_cost.ci_low);
  EXPECT_LT(opt.total_cost.ci_high, none.total_cost.ci_low);
}

TEST(Simulate, DelayFallsAsMeetingRateGrows) {
  double previous = std::numeric_limits<double>::infinity();
  for (const double lambda : {5e-5, 5e-4, 5e-3, 5e-2}) {
    const NetworkParams p{20, 80, 20, Rational(4, 5), lambda, 0.5};
    const auto st = monte_carlo(p, OptimalClosedLoop{}, Relaying::epidemic, 2000, 27);
    EXPECT_LT(st.delay.ci_high, previous);
    previous = st.delay.ci_low;
  }
}

TEST(Simulate, NoSusceptibleRelays) {
  NetworkParams p = reference();
  p.N0 = p.N;
  for (const PolicySpec& pol : {PolicySpec{AlwaysCopy{}}, PolicySpec{OptimalClosedLoop{}}}) {
    const auto st = monte_carlo(p, pol, Relaying::epidemic, 200, 28);
    EXPECT_EQ(st.relay_copies.mean, 0.0);
  }
}

TEST(Simulate, TablePolicySkipsMeetings) {
  const NetworkParams p = reference();
  PolicyTable table;
  for (int m = 0; m < p.M; ++m)
    for (int n = p.N0; n < p.N; ++n) table.actions[{m, n, MeetingType::relay}] = m == 0 ? Action::no_copy : Action::copy;
  SimOptions o;
  o.record_trajectory = true;
  std::size_t skipped = 0;
  for (std::uint64_t rep = 0; rep < 50; ++rep) {
    const RunReport r = Simulator(p, table).run(1, rep, o);
    for (const SimEvent& e : r.trajectory) {
      if (e.kind == EventKind::relay_skipped) {
        EXPECT_EQ(e.m, 0);
        ++skipped;
      }
      if (e.kind == EventKind::relay_copied) { EXPECT_GE(e.m, 1); }
    }
  }
  EXPECT_GT(skipped, 0u);
  const auto st = monte_carlo(p, table, Relaying::epidemic, 10000, 29);
  EXPECT_LT(std::abs(st.total_cost.mean - total_cost(table, p)), 3 * st.total_cost.std_error);
}

TEST(OpenLoop, NoCopiesAfterThreshold) {
  const NetworkParams p = unscale(ScaledParams::fluid_only(0.2, 0.8, 0.2, Rational(4, 5), 0.05, 50), 100);
  const OpenLoopRunner runner(p);
  EXPECT_NEAR(runner.t_star(), 34.41055, 1e-4);
  SimOptions o;
  o.record_trajectory = true;
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    const RunReport r = runner.run(3, rep, o);
    for (const SimEvent& e : r.trajectory)
      if (e.kind == EventKind::relay_copied) { EXPECT_LE(e.t, runner.t_star()); }
  }
  const auto st = monte_carlo(runner, 10000, 31);
  const double exact = open_loop_cost_exact(p, runner.t_star()).total_cost;
  EXPECT_LT(std::abs(st.total_cost.mean - exact), 3 * st.total_cost.std_error);
}

TEST(OpenLoop, ZeroThresholdIsNeverCopy) {
  const NetworkParams p = reference();
  const auto st = monte_carlo(p, OpenLoopThreshold{0.0}, Relaying::epidemic, 2000, 32);
  EXPECT_EQ(st.relay_copies.mean, 0.0);
  EXPECT_LT(std::abs(st.delay.mean - oracle::never_copy_mean_delay(p)), 3 * st.delay.std_error);
}

TEST(ScaledTrajectory, SamplesStepPath) {
  const NetworkParams p = reference();
  const std::vector<double> times = {0.0, 1.0, 5.0, 20.0, 50.0, 50.0, 200.0};
  const auto path = scaled_trajectory(p, OptimalClosedLoop{}, Relaying::epidemic, 4, times);
  ASSERT_EQ(path.size(), times.size());
  EXPECT_EQ(path[0].x, 0.0);
  EXPECT_DOUBLE_EQ(path[0].y, 10.0 / 65);
  for (std::size_t i = 1; i < path.size(); ++i) {
    EXPECT_GE(path[i].x, path[i - 1].x);
    EXPECT_GE(path[i].y, path[i - 1].y);
  }
  const std::vector<double> bad = {1.0, 0.5};
  EXPECT_THROW(scaled_trajectory(p, OptimalClosedLoop{}, Relaying::epidemic, 4, bad), ParamError);
}

TEST(SupDeviation, ShrinksWithNetworkSize) {
  const ScaledParams s = ScaledParams::fluid_only(0.2, 0.8, 0.2, Rational(4, 5), 0.05, 50);
  const auto small = convergence_cell(s, 100, 40, 8);
  const auto large = convergence_cell(s, 1000, 40, 8);
  EXPECT_LT(large.median_sup_deviation(), small.median_sup_deviation());
  for (const auto& r : large.runs) { EXPECT_GT(r.sup_deviation, 0.0); }
}

TEST(MonteCarlo, SummaryStatistics) {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  const SampleStats s = summarize(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.variance, 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.std_error, std::sqrt(5.0 / 12.0));
  EXPECT_NEAR(s.half_width(), 1.959963984540054 * s.std_error, 1e-15);
  EXPECT_THROW(monte_carlo(reference(), NeverCopy{}, Relaying::epidemic, 1, 0), ParamError);
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
}
