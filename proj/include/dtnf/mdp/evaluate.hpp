#pragma once

#include <deque>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>

#include "dtnf/core/lattice.hpp"
#include "dtnf/core/params.hpp"
#include "dtnf/core/policy.hpp"
#include "dtnf/mdp/phi.hpp"

namespace dtnf {

/// Relay actions of a stationary policy on [0, M-1] x [N0, N-1]. Destination
/// meetings always copy. Time-dependent policies have no lattice form.
class LatticePolicy {
 public:
  LatticePolicy(const PolicySpec& policy, const NetworkParams& params, Relaying mode = Relaying::epidemic)
      : params_(validate(params)), actions_(params.M - 1, params.N0, params.N, Action::no_copy) {
    check_policy(policy);
    if (std::holds_alternative<OpenLoopThreshold>(policy))
      throw ParamError("open-loop threshold policies are time-dependent and have no lattice form; use monte_carlo");
    if (const auto* table = std::get_if<PolicyTable>(&policy)) {
      fill_from_table(*table, mode);
      return;
    }
    for (int m = 0; m < params_.M; ++m)
      for (int n = params_.N0; n < params_.N; ++n) actions_(m, n) = resolve(policy, m, n);
  }

  Action relay(int m, int n) const { return actions_.at(m, n); }
  const NetworkParams& params() const { return params_; }

 private:
  Action resolve(const PolicySpec& policy, int m, int n) const {
    if (std::holds_alternative<AlwaysCopy>(policy)) return Action::copy;
    if (std::holds_alternative<NeverCopy>(policy)) return Action::no_copy;
    return phi_positive(m, n, params_) ? Action::copy : Action::no_copy;
  }

  // Walks the states reachable from (0, N0) and requires a relay entry at
  // each one that can meet a susceptible relay.
  void fill_from_table(const PolicyTable& table, Relaying mode) {
    Lattice<char> seen(params_.M, params_.N0, params_.N, 0);
    std::deque<std::pair<int, int>> frontier{{0, params_.N0}};
    seen(0, params_.N0) = 1;
    auto push = [&](int m, int n) {
      if (!seen(m, n)) {
        seen(m, n) = 1;
        frontier.emplace_back(m, n);
      }
    };
    while (!frontier.empty()) {
      const auto [m, n] = frontier.front();
      frontier.pop_front();
      if (m >= params_.M) continue;
      push(m + 1, n);
      if (n >= params_.N || !(channel_rates(m, n, params_, mode).relay > 0.0)) continue;
      const auto it = table.actions.find(StateKey{m, n, MeetingType::relay});
      if (it == table.actions.end())
        throw ParamError("PolicyTable: no action for reachable state (" + std::to_string(m) + "," +
                         std::to_string(n) + ",r)");
      actions_(m, n) = it->second;
      if (it->second == Action::copy) push(m, n + 1);
    }
    for (const auto& [key, action] : table.actions)
      if (key.e == MeetingType::relay && actions_.contains(key.m, key.n) && key.n < params_.N)
        actions_(key.m, key.n) = action;
  }

  NetworkParams params_;
  Lattice<Action> actions_;
};

/// Expected cost-to-go at decision epochs that meet a destination (J_d) or a
/// relay (J_r). J_r is only meaningful for n < N.
template <class Scalar>
struct BasicCostTable {
  NetworkParams params;
  Relaying mode = Relaying::epidemic;
  std::string policy;
  Lattice<Scalar> J_d;
  Lattice<Scalar> J_r;

  bool has_relay_state(int m, int n) const { return n < params.N && J_r.contains(m, n); }
};

using CostTable = BasicCostTable<double>;

namespace detail {

template <class Scalar>
struct ScalarRates {
  Scalar destination;
  Scalar relay;
  Scalar total() const { return destination + relay; }
};

template <class Scalar>
ScalarRates<Scalar> scalar_rates(int m, int n, const NetworkParams& p, Relaying mode) {
  const Scalar lambda(p.lambda);
  const int forwarders = mode == Relaying::epidemic ? m + n : m + p.N0;
  return {lambda * Scalar((m + n) * (p.M - m)), lambda * Scalar(forwarders * (p.N - n))};
}

}  // namespace detail

/// Exact expected costs of a stationary policy by backward recursion over the
/// lattice in decreasing m + n. The u = 0 self-loop at a relay meeting is
/// resolved in closed form: J_r = J_d + [m < M_alpha] / (destination rate).
template <class Scalar = double>
BasicCostTable<Scalar> evaluate_policy_exact_as(const PolicySpec& policy, const NetworkParams& params,
                                                Relaying mode = Relaying::epidemic) {
  const LatticePolicy actions(policy, params, mode);
  const NetworkParams& p = actions.params();
  const int m_alpha = p.M_alpha();
  const Scalar gamma(p.gamma);

  BasicCostTable<Scalar> table;
  table.params = p;
  table.mode = mode;
  table.policy = policy_name(policy);
  table.J_d = Lattice<Scalar>(p.M - 1, p.N0, p.N, Scalar(0));
  table.J_r = Lattice<Scalar>(p.M - 1, p.N0, p.N, Scalar(0));

  // Cost of landing in (m, n) right after an action, before the next meeting.
  auto continue_from = [&](int m, int n) -> Scalar {
    if (m >= p.M) return Scalar(0);
    const auto r = detail::scalar_rates<Scalar>(m, n, p, mode);
    const Scalar total = r.total();
    Scalar cost = m < m_alpha ? Scalar(1) / total : Scalar(0);
    cost += r.destination / total * table.J_d(m, n);
    if (n < p.N) cost += r.relay / total * table.J_r(m, n);
    return cost;
  };

  for (int level = (p.M - 1) + p.N; level >= p.N0; --level) {
    const int m_lo = std::max(0, level - p.N);
    const int m_hi = std::min(p.M - 1, level - p.N0);
    for (int m = m_hi; m >= m_lo; --m) {
      const int n = level - m;
      table.J_d(m, n) = gamma + continue_from(m + 1, n);
      if (n >= p.N) continue;
      if (actions.relay(m, n) == Action::copy) {
        table.J_r(m, n) = gamma + continue_from(m, n + 1);
      } else {
        const auto r = detail::scalar_rates<Scalar>(m, n, p, mode);
        table.J_r(m, n) = table.J_d(m, n) + (m < m_alpha ? Scalar(1) / r.destination : Scalar(0));
      }
    }
  }
  return table;
}

inline CostTable evaluate_policy_exact(const PolicySpec& policy, const NetworkParams& params,
                                       Relaying mode = Relaying::epidemic) {
  return evaluate_policy_exact_as<double>(policy, params, mode);
}

/// E[T_d + gamma * E_c] from t = 0: the mean wait for the first meeting plus
/// the cost-to-go weighted by the type of the first susceptible node met.
template <class Scalar>
Scalar total_cost(const BasicCostTable<Scalar>& table) {
  const NetworkParams& p = table.params;
  const auto r = detail::scalar_rates<Scalar>(0, p.N0, p, table.mode);
  const Scalar total = r.total();
  Scalar cost = Scalar(1) / total + r.destination / total * table.J_d(0, p.N0);
  if (p.N0 < p.N) cost += r.relay / total * table.J_r(0, p.N0);
  return cost;
}

inline double total_cost(const PolicySpec& policy, const NetworkParams& params,
                         Relaying mode = Relaying::epidemic) {
  return total_cost(evaluate_policy_exact(policy, params, mode));
}

}  // namespace dtnf
