#pragma once

#include <compare>
#include <map>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>

#include "dtnf/core/params.hpp"

namespace dtnf {

/// Copy to a relay iff Phi(m, n) > 0; always copy to destinations.
struct OptimalClosedLoop {};

/// Copy to relays met at times t <= t_star, never afterwards. Needs no
/// knowledge of (m, n).
struct OpenLoopThreshold {
  double t_star = 0.0;
};

struct AlwaysCopy {};
struct NeverCopy {};

struct StateKey {
  int m = 0;
  int n = 0;
  MeetingType e = MeetingType::relay;
  auto operator<=>(const StateKey&) const = default;
};

/// Explicit lattice policy. Relay entries are required for every reachable
/// (m, n, r); destination entries are optional and must be `copy`.
struct PolicyTable {
  std::map<StateKey, Action> actions;
};

using PolicySpec = std::variant<OptimalClosedLoop, OpenLoopThreshold, AlwaysCopy, NeverCopy, PolicyTable>;

inline std::string policy_name(const PolicySpec& policy) {
  return std::visit(
      [](const auto& p) -> std::string {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, OptimalClosedLoop>) return "optimal";
        else if constexpr (std::is_same_v<P, OpenLoopThreshold>) return "open-loop";
        else if constexpr (std::is_same_v<P, AlwaysCopy>) return "always-copy";
        else if constexpr (std::is_same_v<P, NeverCopy>) return "never-copy";
        else return "table";
      },
      policy);
}

inline void check_policy(const PolicySpec& policy) {
  if (const auto* open = std::get_if<OpenLoopThreshold>(&policy)) {
    if (!(open->t_star >= 0.0)) throw ParamError("OpenLoopThreshold requires t_star >= 0");
  }
  if (const auto* table = std::get_if<PolicyTable>(&policy)) {
    for (const auto& [key, action] : table->actions) {
      if (key.e == MeetingType::destination && action != Action::copy)
        throw ParamError("PolicyTable: destination meetings must copy (state " + std::to_string(key.m) + "," +
                         std::to_string(key.n) + ",d)");
    }
  }
}

}  // namespace dtnf
