#pragma once

#include <string>

#include "dtnf/core/lattice.hpp"
#include "dtnf/core/params.hpp"
#include "dtnf/mdp/evaluate.hpp"

namespace dtnf {

struct OracleLimits {
  int max_M = 8;
  int max_N = 16;
};

template <class Scalar>
struct BasicOracleResult {
  Lattice<Action> relay_action;  // argmin at (m, n, r), n < N
  Lattice<Scalar> copy_value;    // Q(m, n, r; copy)
  Lattice<Scalar> skip_value;    // Q(m, n, r; no-copy) with the self-loop resolved
  BasicCostTable<Scalar> costs;
};

using OracleResult = BasicOracleResult<double>;

/// Optimal relay actions by exhaustive Bellman recursion with no structural
/// assumption. At each lattice point (decreasing m + n) both relay actions are
/// priced; the no-copy branch returns to the same (m, n) and is solved from
/// J_r = c0 + p_d J_d + p_r J_r. Ties go to no-copy. Destination meetings
/// always copy.
template <class Scalar = double>
BasicOracleResult<Scalar> brute_force_oracle_as(const NetworkParams& params, Relaying mode = Relaying::epidemic,
                                               OracleLimits limits = {}) {
  const NetworkParams p = validate(params);
  if (p.M > limits.max_M || p.N > limits.max_N)
    throw ParamError("brute_force_oracle: instance M=" + std::to_string(p.M) + ", N=" + std::to_string(p.N) +
                     " exceeds the enumeration guideline M<=" + std::to_string(limits.max_M) +
                     ", N<=" + std::to_string(limits.max_N));
  const int m_alpha = p.M_alpha();
  const Scalar lambda(p.lambda);
  const Scalar gamma(p.gamma);

  // Embedded-chain quantities at (m, n): probability the next susceptible
  // node met is a destination / relay, and the mean time until that meeting.
  struct Step {
    Scalar p_d, p_r, mean_wait;
  };
  auto step = [&](int m, int n) -> Step {
    const Scalar to_destinations = Scalar((m + n) * (p.M - m));
    if (mode == Relaying::epidemic) {
      const Scalar susceptible = Scalar(p.M + p.N - m - n);
      return {Scalar(p.M - m) / susceptible, Scalar(p.N - n) / susceptible,
              Scalar(1) / (lambda * Scalar(m + n) * susceptible)};
    }
    const Scalar to_relays = Scalar((m + p.N0) * (p.N - n));
    const Scalar all = to_destinations + to_relays;
    return {to_destinations / all, to_relays / all, Scalar(1) / (lambda * all)};
  };

  BasicOracleResult<Scalar> out;
  out.relay_action = Lattice<Action>(p.M - 1, p.N0, p.N, Action::no_copy);
  out.copy_value = Lattice<Scalar>(p.M - 1, p.N0, p.N, Scalar(0));
  out.skip_value = Lattice<Scalar>(p.M - 1, p.N0, p.N, Scalar(0));
  auto& J = out.costs;
  J.params = p;
  J.mode = mode;
  J.policy = "oracle";
  J.J_d = Lattice<Scalar>(p.M - 1, p.N0, p.N, Scalar(0));
  J.J_r = Lattice<Scalar>(p.M - 1, p.N0, p.N, Scalar(0));

  // Expected future cost after the action leaves the chain in (m, n).
  auto after = [&](int m, int n) -> Scalar {
    if (m == p.M) return Scalar(0);
    const Step s = step(m, n);
    Scalar v = (m < m_alpha ? s.mean_wait : Scalar(0)) + s.p_d * J.J_d(m, n);
    if (n < p.N) v += s.p_r * J.J_r(m, n);
    return v;
  };

  for (int level = (p.M - 1) + p.N; level >= p.N0; --level) {
    for (int m = std::min(p.M - 1, level - p.N0); m >= std::max(0, level - p.N); --m) {
      const int n = level - m;
      J.J_d(m, n) = gamma + after(m + 1, n);
      if (n == p.N) continue;

      const Scalar copy = gamma + after(m, n + 1);
      const Step here = step(m, n);
      const Scalar c0 = m < m_alpha ? here.mean_wait : Scalar(0);
      const Scalar skip = (c0 + here.p_d * J.J_d(m, n)) / (Scalar(1) - here.p_r);

      out.copy_value(m, n) = copy;
      out.skip_value(m, n) = skip;
      if (copy < skip) {
        out.relay_action(m, n) = Action::copy;
        J.J_r(m, n) = copy;
      } else {
        out.relay_action(m, n) = Action::no_copy;
        J.J_r(m, n) = skip;
      }
    }
  }
  return out;
}

inline OracleResult brute_force_oracle(const NetworkParams& params, Relaying mode = Relaying::epidemic,
                                       OracleLimits limits = {}) {
  return brute_force_oracle_as<double>(params, mode, limits);
}

}  // namespace dtnf
