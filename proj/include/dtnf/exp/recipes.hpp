#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dtnf/exp/config.hpp"
#include "dtnf/exp/output.hpp"
#include "dtnf/exp/studies.hpp"
#include "dtnf/fluid/sweep.hpp"
#include "dtnf/mdp/oracle.hpp"
#include "dtnf/mdp/policy_map.hpp"

namespace dtnf::exp {

namespace detail {

inline json ci(const SampleStats& s) { return json::array({s.ci_low, s.ci_high}); }

inline void require_K(const ExperimentConfig& c) {
  if (c.K.empty()) throw ParamError(std::string(to_string(c.recipe)) + ": needs a non-empty K list");
  for (const int k : c.K)
    if (k < 2) throw ParamError(std::string(to_string(c.recipe)) + ": every K must be >= 2");
}

inline void require_reps(const ExperimentConfig& c) {
  if (c.replications < 2) throw ParamError(std::string(to_string(c.recipe)) + ": replications must be >= 2");
}

}  // namespace detail

inline RecipeOutput run_policy_map(const ExperimentConfig& c) {
  const NetworkParams p = c.network();
  RecipeOutput out;

  Table map{"policy_map", {"m", "n", "action"}, {}};
  for (const auto& e : policy_map(p)) map.add({e.m, e.n, static_cast<int>(e.action)});

  const CostTable costs = evaluate_policy_exact(OptimalClosedLoop{}, p, c.mode);
  Table cost{"cost_table", {"m", "n", "J_d", "J_r"}, {}};
  for (int m = 0; m < p.M; ++m)
    for (int n = p.N0; n <= p.N; ++n)
      cost.add({m, n, costs.J_d(m, n), costs.has_relay_state(m, n) ? json(costs.J_r(m, n)) : json(nullptr)});

  Table boundary{"boundary", {"m", "last_copy_n"}, {}};
  const auto last = copy_boundary(p);
  bool nonincreasing = true;
  for (int m = 0; m < p.M; ++m) {
    const int b = last[static_cast<std::size_t>(m)];
    if (m > 0 && b > last[static_cast<std::size_t>(m - 1)]) nonincreasing = false;
    if (b >= p.N0) {
      boundary.add({m, b});
      out.text.push_back("m=" + std::to_string(m) + " -> last-copy n=" + std::to_string(b));
    } else {
      boundary.add({m, nullptr});
      out.text.push_back("m=" + std::to_string(m) + " -> no copy");
    }
  }
  out.tables = {std::move(map), std::move(cost), std::move(boundary)};
  out.summary = {{"M_alpha", p.M_alpha()},
                 {"mode", dtnf::to_string(c.mode)},
                 {"copy_states", copy_set(p).size()},
                 {"boundary_nonincreasing", nonincreasing},
                 {"total_cost_optimal", total_cost(costs)}};
  return out;
}

inline RecipeOutput run_fluid(const ExperimentConfig& c) {
  const ScaledParams s = c.scaled();
  const FluidSolution sol = integrate(s, c.mode);
  const FluidCost cost = fluid_cost(sol);
  const std::size_t samples = std::max<std::size_t>(c.samples, 1);

  std::vector<double> times;
  for (std::size_t k = 0; k <= samples; ++k) times.push_back(sol.tau * static_cast<double>(k) / samples);
  times.push_back(sol.tau_star);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  Table traj{"fluid", {"t", "x", "y", "phi", "mode"}, {}};
  for (const double t : times) {
    const FluidPoint f = sol.at(t);
    const double x = std::clamp(f.x, 0.0, s.X), y = std::clamp(f.y, s.Y0, s.Y);
    traj.add({t, f.x, f.y, phi_fluid(x, y, s), dtnf::to_string(c.mode)});
  }

  const SweepResult sweep = pontryagin_sweep(s, c.mode, sol.tau / 1000.0);
  RecipeOutput out;
  out.tables.push_back(std::move(traj));
  out.summary = {{"tau_star", sol.tau_star},
                 {"tau", sol.tau},
                 {"y_tau_star", sol.y_at_tau_star},
                 {"fluid_cost", cost.relay_cost},
                 {"mode", dtnf::to_string(c.mode)},
                 {"x_tau_star", sol.x_at_tau_star},
                 {"copies_made", cost.copies_made},
                 {"destination_energy", cost.destination_energy},
                 {"sweep_argmin", sweep.argmin},
                 {"sweep_min_cost", sweep.min_cost},
                 {"sweep_refined_step", sweep.refined_step}};
  return out;
}

inline RecipeOutput run_converge(const ExperimentConfig& c) {
  detail::require_K(c);
  detail::require_reps(c);
  const ScaledParams s = c.scaled();
  Table runs{"runs",
             {"K", "rep", "seed", "sup_deviation", "tau_K", "tau", "abs_tau_gap", "stop_x", "stop_y", "tau_star",
              "x_tau_star", "y_tau_star"},
             {}};
  Table by_k{"converge",
             {"K", "runs", "median_sup_deviation", "median_abs_tau_gap", "mean_tau_K", "tau", "tau_star"},
             {}};
  std::vector<double> med_dev, med_gap;
  for (const int K : c.K) {
    const ConvergenceCell cell = convergence_cell(s, K, c.replications, c.seed, c.mode);
    std::vector<double> tk;
    for (std::size_t i = 0; i < cell.runs.size(); ++i) {
      const auto& r = cell.runs[i];
      tk.push_back(r.tau_K);
      runs.add({K, i, r.seed, r.sup_deviation, r.tau_K, cell.tau, r.tau_gap, r.stop_x, r.stop_y, cell.tau_star,
                cell.x_at_tau_star, cell.y_at_tau_star});
    }
    med_dev.push_back(cell.median_sup_deviation());
    med_gap.push_back(cell.median_tau_gap());
    by_k.add({K, cell.runs.size(), med_dev.back(), med_gap.back(), summarize(tk).mean, cell.tau, cell.tau_star});
  }
  auto decreasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(v[i] < v[i - 1])) return false;
    return true;
  };
  RecipeOutput out;
  out.tables = {std::move(by_k), std::move(runs)};
  out.summary = {{"median_sup_deviation_decreasing", decreasing(med_dev)},
                 {"median_abs_tau_gap_decreasing", decreasing(med_gap)}};
  return out;
}

namespace detail {

inline void add_policy_rows(Table& t, int K, double lambda, Relaying mode, const char* policy,
                            const CostStatistics& st, json exact, double t_star, const FluidCost& fluid) {
  t.add({K, lambda, dtnf::to_string(mode), policy, st.replications, st.delay.mean, st.delay.ci_low, st.delay.ci_high,
         st.relay_copies.mean, st.relay_copies.ci_low, st.relay_copies.ci_high, st.total_cost.mean,
         st.total_cost.ci_low, st.total_cost.ci_high, st.relay_energy_cost.mean, st.relay_energy_cost.ci_low,
         st.relay_energy_cost.ci_high, std::move(exact), t_star, fluid.tau, fluid.relay_cost,
         fluid.copies_made});
}

inline const std::vector<std::string> comparison_columns = {
    "K",          "lambda",          "mode",          "policy",         "replications",
    "mean_delay", "delay_ci_low",    "delay_ci_high", "mean_relay_copies", "copies_ci_low",
    "copies_ci_high", "mean_total_cost", "cost_ci_low", "cost_ci_high", "mean_relay_energy_cost",
    "relay_energy_ci_low", "relay_energy_ci_high", "exact_cost", "tau_star", "fluid_tau",
    "fluid_relay_cost", "fluid_copies"};

}  // namespace detail

inline RecipeOutput run_cost_compare(const ExperimentConfig& c) {
  detail::require_K(c);
  detail::require_reps(c);
  std::vector<double> lambdas = c.lambdas;
  if (lambdas.empty() && c.lambda) lambdas.push_back(*c.lambda);
  if (lambdas.empty()) throw ParamError("cost-compare: needs lambdas (or lambda)");

  Table t{"cost_compare", detail::comparison_columns, {}};
  Table gaps{"gaps",
             {"K", "lambda", "tau_star", "exact_optimal_cost", "exact_open_loop_cost", "relative_gap",
              "mc_optimal_cost", "mc_open_loop_cost", "mc_relative_gap", "identical_policies"},
             {}};
  for (const double lam : lambdas)
    for (const int K : c.K) {
      const PolicyComparison cmp = compare_policies(c.network_at(K, lam), c.mode, c.replications, c.seed);
      detail::add_policy_rows(t, K, lam, c.mode, "optimal", cmp.optimal, cmp.exact_optimal_cost, 0.0, cmp.fluid);
      detail::add_policy_rows(t, K, lam, c.mode, "open-loop", cmp.open_loop, cmp.exact_open_loop.total_cost,
                              cmp.t_star, cmp.fluid);
      gaps.add({K, lam, cmp.t_star, cmp.exact_optimal_cost, cmp.exact_open_loop.total_cost, cmp.relative_gap(),
                cmp.optimal.total_cost.mean, cmp.open_loop.total_cost.mean, cmp.mc_relative_gap(),
                cmp.identical_policies});
    }
  RecipeOutput out;
  out.tables = {std::move(t), std::move(gaps)};
  return out;
}

inline RecipeOutput run_twohop_compare(const ExperimentConfig& c) {
  detail::require_K(c);
  detail::require_reps(c);
  const ScaledParams s = c.scaled();
  Table t{"twohop_compare", detail::comparison_columns, {}};
  Table fluid{"fluid", {"mode", "tau_star", "tau", "y_tau_star", "copies_made", "fluid_cost"}, {}};
  for (const Relaying mode : {Relaying::epidemic, Relaying::two_hop}) {
    const FluidCost f = fluid_cost(s, mode);
    fluid.add({dtnf::to_string(mode), f.tau_star, f.tau, f.y_at_tau_star, f.copies_made, f.relay_cost});
  }
  for (const int K : c.K) {
    const NetworkParams net = unscale(s, K);
    for (const Relaying mode : {Relaying::epidemic, Relaying::two_hop}) {
      const PolicyComparison cmp = compare_policies(net, mode, c.replications, c.seed);
      detail::add_policy_rows(t, K, net.lambda, mode, "optimal", cmp.optimal, cmp.exact_optimal_cost, 0.0,
                              cmp.fluid);
      detail::add_policy_rows(t, K, net.lambda, mode, "open-loop", cmp.open_loop, cmp.exact_open_loop.total_cost,
                              cmp.t_star, cmp.fluid);
    }
  }
  RecipeOutput out;
  out.tables = {std::move(fluid), std::move(t)};
  return out;
}

inline RecipeOutput run_oracle_check(const ExperimentConfig& c) {
  const NetworkParams p = c.network();
  const OracleResult oracle = brute_force_oracle(p, c.mode);
  const CostTable eval = evaluate_policy_exact(OptimalClosedLoop{}, p, c.mode);
  const PhiTable phi(p);

  Table t{"oracle_check",
          {"m", "n", "phi", "phi_action", "oracle_action", "copy_value", "skip_value", "J_r_threshold",
           "J_r_oracle"},
          {}};
  std::size_t mismatches = 0;
  double worst = 0.0;
  for (int m = 0; m < p.M; ++m)
    for (int n = p.N0; n < p.N; ++n) {
      const int a = phi.copy(m, n) ? 1 : 0;
      const int b = static_cast<int>(oracle.relay_action(m, n));
      if (a != b) ++mismatches;
      for (const auto& [x, y] : {std::pair{eval.J_r(m, n), oracle.costs.J_r(m, n)},
                                 std::pair{eval.J_d(m, n), oracle.costs.J_d(m, n)}})
        worst = std::max(worst, std::abs(x - y) / std::max(std::abs(y), 1e-300));
      t.add({m, n, phi.value(m, n), a, b, oracle.copy_value(m, n), oracle.skip_value(m, n), eval.J_r(m, n),
             oracle.costs.J_r(m, n)});
    }
  RecipeOutput out;
  out.tables.push_back(std::move(t));
  out.summary = {{"mode", dtnf::to_string(c.mode)},
                 {"action_mismatches", mismatches},
                 {"max_relative_value_difference", worst},
                 {"agree", mismatches == 0 && worst <= 1e-10}};
  if (mismatches != 0 || worst > 1e-10) out.status = 3;
  return out;
}

inline RecipeOutput run_simulate(const ExperimentConfig& c) {
  detail::require_reps(c);
  const NetworkParams p = c.network();
  ExperimentConfig resolved = c;
  if (c.policy == "open-loop" && !c.t_star) resolved.t_star = integrate(scale(p), c.mode).tau_star;
  const Simulator sim(p, resolved.policy_spec(), c.mode);

  SimOptions with_path;
  with_path.record_trajectory = true;
  const auto reports = parallel_indexed<RunReport>(c.replications, 0, [&](std::size_t rep) {
    return sim.run(c.seed, rep, rep < c.trajectories ? with_path : SimOptions{});
  });

  Table runs{"runs", {"rep", "seed", "T_d", "relay_copies", "dest_copies", "total_cost"}, {}};
  Table traj{"trajectory", {"rep", "t", "m", "n"}, {}};
  for (std::size_t rep = 0; rep < reports.size(); ++rep) {
    const RunReport& r = reports[rep];
    runs.add({rep, r.seed, r.T_d, r.relay_copies, r.dest_copies, r.total_cost});
    if (rep < c.trajectories) {
      traj.add({rep, 0.0, 0, p.N0});
      for (const SimEvent& e : r.trajectory)
        if (e.kind != EventKind::relay_skipped) traj.add({rep, e.t, e.m, e.n});
    }
  }
  const CostStatistics st = cost_statistics(reports);
  RecipeOutput out;
  out.tables = {std::move(runs), std::move(traj)};
  out.summary = {{"policy", c.policy},
                 {"mode", dtnf::to_string(c.mode)},
                 {"replications", st.replications},
                 {"mean_delay", st.delay.mean},
                 {"delay_ci", detail::ci(st.delay)},
                 {"mean_relay_copies", st.relay_copies.mean},
                 {"relay_copies_ci", detail::ci(st.relay_copies)},
                 {"mean_total_cost", st.total_cost.mean},
                 {"total_cost_ci", detail::ci(st.total_cost)}};
  if (resolved.t_star) out.summary["t_star"] = *resolved.t_star;
  if (resolved.t_star && c.policy == "open-loop")
    out.summary["exact_total_cost"] = open_loop_cost_exact(p, *resolved.t_star, c.mode).total_cost;
  else
    out.summary["exact_total_cost"] = total_cost(resolved.policy_spec(), p, c.mode);
  return out;
}

inline RecipeOutput run_recipe(const ExperimentConfig& c) {
  switch (c.recipe) {
    case Recipe::policy_map: return run_policy_map(c);
    case Recipe::fluid_run: return run_fluid(c);
    case Recipe::converge: return run_converge(c);
    case Recipe::cost_compare: return run_cost_compare(c);
    case Recipe::twohop_compare: return run_twohop_compare(c);
    case Recipe::oracle_check: return run_oracle_check(c);
    case Recipe::simulate: return run_simulate(c);
  }
  throw ParamError("unknown recipe");
}

}  // namespace dtnf::exp
