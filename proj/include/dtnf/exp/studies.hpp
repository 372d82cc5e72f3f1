#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dtnf/fluid/integrate.hpp"
#include "dtnf/mdp/evaluate.hpp"
#include "dtnf/mdp/open_loop.hpp"
#include "dtnf/mdp/phi.hpp"
#include "dtnf/sim/gillespie.hpp"
#include "dtnf/sim/monte_carlo.hpp"

namespace dtnf {

inline double median(std::vector<double> v) {
  if (v.empty()) throw ParamError("median of an empty sample");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

// ---- fluid convergence -----------------------------------------------------

struct ConvergenceRun {
  std::uint64_t seed = 0;
  double sup_deviation = 0.0;
  double tau_K = 0.0;
  double tau_gap = 0.0;
  /// Scaled state where the closed-loop policy stopped copying (the first
  /// visited state with Phi <= 0).
  double stop_x = 0.0;
  double stop_y = 0.0;
};

struct ConvergenceCell {
  int K = 0;
  NetworkParams network;
  double tau = 0.0;
  double tau_star = 0.0;
  double x_at_tau_star = 0.0;
  double y_at_tau_star = 0.0;
  std::vector<ConvergenceRun> runs;

  double median_sup_deviation() const {
    std::vector<double> v;
    for (const auto& r : runs) v.push_back(r.sup_deviation);
    return median(v);
  }
  double median_tau_gap() const {
    std::vector<double> v;
    for (const auto& r : runs) v.push_back(r.tau_gap);
    return median(v);
  }
};

/// Optimal closed-loop CTMC at K nodes against the fluid solution of `s`:
/// sup over [0, tau] of the max-norm deviation and |T_d - tau| per run.
inline ConvergenceCell convergence_cell(const ScaledParams& s, int K, std::size_t runs, std::uint64_t seed,
                                        Relaying mode = Relaying::epidemic, unsigned threads = 0) {
  ConvergenceCell cell;
  cell.K = K;
  cell.network = unscale(s, K);
  const FluidSolution fluid = integrate(scale(cell.network), mode);
  cell.tau = fluid.tau;
  cell.tau_star = fluid.tau_star;
  cell.x_at_tau_star = fluid.x_at_tau_star;
  cell.y_at_tau_star = fluid.y_at_tau_star;

  const Simulator sim(cell.network, OptimalClosedLoop{}, mode);
  const PhiTable phi(cell.network);
  SimOptions options;
  options.record_trajectory = true;
  cell.runs = parallel_indexed<ConvergenceRun>(runs, threads, [&](std::size_t rep) {
    const RunReport r = sim.run(seed, rep, options);
    ConvergenceRun out;
    out.seed = r.seed;
    out.sup_deviation = sup_deviation(r, K, fluid, fluid.tau);
    out.tau_K = r.T_d;
    out.tau_gap = std::abs(r.T_d - fluid.tau);
    int m = 0, n = r.N0;
    auto stopped = [&] { return m >= cell.network.M || n >= cell.network.N || !phi.copy(m, n); };
    for (std::size_t i = 0; !stopped() && i < r.trajectory.size(); ++i) {
      m = r.trajectory[i].m;
      n = r.trajectory[i].n;
    }
    out.stop_x = static_cast<double>(m) / K;
    out.stop_y = static_cast<double>(n) / K;
    return out;
  });
  return cell;
}

// ---- optimal vs open-loop costs ---------------------------------------------

struct PolicyComparison {
  int K = 0;
  double lambda = 0.0;
  NetworkParams network;
  Relaying mode = Relaying::epidemic;
  double exact_optimal_cost = 0.0;
  OpenLoopCost exact_open_loop;
  CostStatistics optimal;    // MC of the closed-loop policy
  CostStatistics open_loop;  // MC of the fluid time-threshold policy
  double t_star = 0.0;       // threshold used by the open-loop policy
  FluidCost fluid;
  /// t_star = 0 and the closed-loop policy refuses the first relay: both
  /// policies never copy, so their costs coincide exactly.
  bool identical_policies = false;

  /// (exact open-loop - exact optimal) / exact optimal, total-cost convention.
  double relative_gap() const {
    if (identical_policies) return 0.0;
    return (exact_open_loop.total_cost - exact_optimal_cost) / exact_optimal_cost;
  }
  /// Same gap from the two Monte Carlo means.
  double mc_relative_gap() const {
    return (open_loop.total_cost.mean - optimal.total_cost.mean) / optimal.total_cost.mean;
  }
};

inline PolicyComparison compare_policies(const NetworkParams& network, Relaying mode, std::size_t replications,
                                         std::uint64_t seed, unsigned threads = 0) {
  PolicyComparison c;
  c.network = validate(network);
  c.K = network.K();
  c.lambda = network.lambda;
  c.mode = mode;
  c.exact_optimal_cost = total_cost(OptimalClosedLoop{}, network, mode);
  // Same seed for both policies: common random numbers sharpen the gap.
  c.optimal = monte_carlo(Simulator(network, OptimalClosedLoop{}, mode), replications, seed, {}, threads);
  const FluidSolution sol = integrate(scale(network), mode);
  c.fluid = fluid_cost(sol);
  c.t_star = sol.tau_star;
  c.open_loop = monte_carlo(Simulator(network, OpenLoopThreshold{c.t_star}, mode), replications, seed, {}, threads);
  c.exact_open_loop = open_loop_cost_exact(network, c.t_star, mode);
  c.identical_policies = c.t_star == 0.0 && !phi_positive(0, network.N0, network);
  return c;
}

}  // namespace dtnf
