#pragma once

#include <ostream>
#include <vector>

#include "dtnf/core/format.hpp"
#include "dtnf/mdp/evaluate.hpp"
#include "dtnf/mdp/phi.hpp"

namespace dtnf {

struct PolicyMapEntry {
  int m = 0;
  int n = 0;
  Action action = Action::no_copy;
};

/// Action at a relay meeting for every (m, n) in [0, M-1] x [N0, N]. The copy
/// set is the entries with action == copy.
inline std::vector<PolicyMapEntry> policy_map(const NetworkParams& params) {
  const PhiTable table(params);
  std::vector<PolicyMapEntry> out;
  for (int m = 0; m < params.M; ++m)
    for (int n = params.N0; n <= params.N; ++n)
      out.push_back({m, n, table.copy(m, n) ? Action::copy : Action::no_copy});
  return out;
}

inline std::vector<PolicyMapEntry> copy_set(const NetworkParams& params) {
  std::vector<PolicyMapEntry> out;
  for (const auto& e : policy_map(params))
    if (e.action == Action::copy) out.push_back(e);
  return out;
}

inline void write_policy_map_csv(std::ostream& os, const std::vector<PolicyMapEntry>& entries) {
  os << "m,n,action\n";
  for (const auto& e : entries) os << e.m << ',' << e.n << ',' << static_cast<int>(e.action) << '\n';
}

/// J_r is left empty where no relay meeting can occur (n = N).
inline void write_cost_table_csv(std::ostream& os, const CostTable& table) {
  os << "m,n,J_d,J_r\n";
  const auto& p = table.params;
  for (int m = 0; m < p.M; ++m)
    for (int n = p.N0; n <= p.N; ++n) {
      os << m << ',' << n << ',' << format_double(table.J_d(m, n)) << ',';
      if (table.has_relay_state(m, n)) os << format_double(table.J_r(m, n));
      os << '\n';
    }
}

}  // namespace dtnf
