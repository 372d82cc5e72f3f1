#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "dtnf/core/params.hpp"
#include "dtnf/core/policy.hpp"
#include "dtnf/fluid/integrate.hpp"
#include "dtnf/mdp/evaluate.hpp"
#include "dtnf/sim/rng.hpp"

namespace dtnf {

enum class EventKind { destination_infected, relay_copied, relay_skipped };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::destination_infected: return "destination-infected";
    case EventKind::relay_copied: return "relay-meeting-copied";
    case EventKind::relay_skipped: return "relay-meeting-skipped";
  }
  return "?";
}

/// A meeting that changed, or could have changed, the state; (m, n) is the
/// state right after it.
struct SimEvent {
  double t = 0.0;
  EventKind kind = EventKind::destination_infected;
  int m = 0;
  int n = 0;
};

struct SimOptions {
  /// Keep simulating after M_alpha until all M destinations hold the packet,
  /// so energy spent after delivery is counted.
  bool run_to_full_delivery = true;
  bool record_trajectory = false;
};

struct RunReport {
  std::uint64_t seed = 0;
  int N0 = 0;
  /// Time m first reaches M_alpha.
  double T_d = 0.0;
  /// Time m reaches M (equals T_d when the run stops at M_alpha).
  double completion_time = 0.0;
  int relay_copies = 0;
  int relay_copies_at_T_d = 0;
  int dest_copies = 0;
  int dest_copies_at_T_d = 0;
  /// T_d + gamma * (relay_copies + dest_copies).
  double total_cost = 0.0;
  /// T_d + gamma * (N0 + relay_copies): the finite-K analogue of tau + Gamma y(tau*).
  double relay_energy_cost = 0.0;
  std::vector<SimEvent> trajectory;
};

/// Aggregate-rate Gillespie simulation of the (m, n) chain. At (m, n) an
/// infected node meets a susceptible destination at rate lambda (m+n)(M-m)
/// and a forwarding-capable node meets a susceptible relay at rate
/// lambda (m+n)(N-n) (epidemic) or lambda (m+N0)(N-n) (two-hop).
class Simulator {
 public:
  Simulator(const NetworkParams& params, PolicySpec policy, Relaying mode = Relaying::epidemic)
      : params_(validate(params)), policy_(std::move(policy)), mode_(mode) {
    check_policy(policy_);
    if (const auto* open = std::get_if<OpenLoopThreshold>(&policy_)) {
      t_star_ = open->t_star;
    } else {
      lattice_.emplace(policy_, params_, mode_);
      // Under these policies a refused relay is never followed by a copy, so
      // the relay channel is dropped instead of sampling skipped meetings.
      prune_refusals_ = std::holds_alternative<OptimalClosedLoop>(policy_) ||
                        std::holds_alternative<NeverCopy>(policy_);
    }
  }

  const NetworkParams& params() const { return params_; }
  const PolicySpec& policy() const { return policy_; }
  Relaying mode() const { return mode_; }

  RunReport run(std::uint64_t seed, std::uint64_t rep = 0, SimOptions options = {}) const {
    const NetworkParams& p = params_;
    RunReport report;
    report.seed = replication_seed(seed, rep);
    report.N0 = p.N0;
    SplitMix64 rng(report.seed);

    const int m_alpha = p.M_alpha();
    const int target = options.run_to_full_delivery ? p.M : m_alpha;
    double t = 0.0;
    int m = 0, n = p.N0;
    bool window_open = !t_star_ || *t_star_ >= 0.0;
    bool delivered = false;

    while (m < target) {
      const ChannelRates r = channel_rates(m, n, p, mode_);
      assert(rates_consistent(m, n, r));
      bool relay_on = n < p.N && r.relay > 0.0;
      if (relay_on) {
        if (t_star_)
          relay_on = window_open;
        else if (prune_refusals_)
          relay_on = lattice_->relay(m, n) == Action::copy;
      }
      const double rate = r.destination + (relay_on ? r.relay : 0.0);
      const double dt = rng.exponential(rate);
      if (t_star_ && relay_on && t + dt > *t_star_) {
        // The relay channel shuts at t_star; restart from there (memoryless).
        t = *t_star_;
        window_open = false;
        continue;
      }
      t += dt;
      if (!relay_on || rng.uniform() * rate < r.destination) {
        ++m;
        record(report, options, {t, EventKind::destination_infected, m, n});
        if (!delivered && m >= m_alpha) {
          delivered = true;
          report.T_d = t;
          report.relay_copies_at_T_d = report.relay_copies;
          report.dest_copies_at_T_d = m;
        }
        continue;
      }
      const bool copy = t_star_ ? true : lattice_->relay(m, n) == Action::copy;
      if (copy) {
        ++n;
        ++report.relay_copies;
        record(report, options, {t, EventKind::relay_copied, m, n});
      } else {
        record(report, options, {t, EventKind::relay_skipped, m, n});
      }
    }
    report.completion_time = t;
    report.dest_copies = m;
    report.total_cost = report.T_d + p.gamma * (report.relay_copies + report.dest_copies);
    report.relay_energy_cost = report.T_d + p.gamma * (p.N0 + report.relay_copies);
    return report;
  }

 private:
  static void record(RunReport& report, const SimOptions& options, const SimEvent& e) {
    if (options.record_trajectory) report.trajectory.push_back(e);
  }

  // Total exit rate recomputed from the embedded chain: meetings between
  // infected nodes and susceptible ones.
  bool rates_consistent(int m, int n, const ChannelRates& r) const {
    const NetworkParams& p = params_;
    double expected = p.lambda * (m + n) * (p.M + p.N - m - n);
    if (mode_ == Relaying::two_hop) expected = p.lambda * ((m + n) * (p.M - m) + (m + p.N0) * (p.N - n));
    return std::abs(r.total() - expected) <= 1e-12 * std::max(1.0, expected);
  }

  NetworkParams params_;
  PolicySpec policy_;
  Relaying mode_;
  std::optional<LatticePolicy> lattice_;
  std::optional<double> t_star_;
  bool prune_refusals_ = false;
};

inline RunReport simulate(const NetworkParams& params, const PolicySpec& policy, Relaying mode, std::uint64_t seed,
                          SimOptions options = {}) {
  return Simulator(params, policy, mode).run(seed, 0, options);
}

/// u-infinity on the finite network: tau* comes from the fluid solution of
/// scale(params) and relays are copied iff the meeting happens at t <= tau*.
class OpenLoopRunner {
 public:
  OpenLoopRunner(const NetworkParams& params, Relaying mode = Relaying::epidemic, IntegratorOptions fluid = {})
      : t_star_(integrate(scale(params), mode, fluid).tau_star),
        sim_(params, OpenLoopThreshold{t_star_}, mode) {}

  double t_star() const { return t_star_; }
  const Simulator& simulator() const { return sim_; }
  RunReport run(std::uint64_t seed, std::uint64_t rep = 0, SimOptions options = {}) const {
    return sim_.run(seed, rep, options);
  }

 private:
  double t_star_;
  Simulator sim_;
};

inline RunReport open_loop_runner(const NetworkParams& params, Relaying mode, std::uint64_t seed,
                                  SimOptions options = {}) {
  return OpenLoopRunner(params, mode).run(seed, 0, options);
}

/// (m/K, n/K) of a recorded run at each sample time; right-continuous steps.
inline std::vector<FluidPoint> sample_scaled(const RunReport& run, int K, std::span<const double> sample_times) {
  std::vector<FluidPoint> out;
  out.reserve(sample_times.size());
  std::size_t next = 0;
  int m = 0, n = run.N0;
  double previous = -std::numeric_limits<double>::infinity();
  for (const double t : sample_times) {
    if (t < previous) throw ParamError("scaled_trajectory: sample_times must be nondecreasing");
    previous = t;
    while (next < run.trajectory.size() && run.trajectory[next].t <= t) {
      m = run.trajectory[next].m;
      n = run.trajectory[next].n;
      ++next;
    }
    out.push_back({t, static_cast<double>(m) / K, static_cast<double>(n) / K});
  }
  return out;
}

inline std::vector<FluidPoint> scaled_trajectory(const NetworkParams& params, const PolicySpec& policy,
                                                 Relaying mode, std::uint64_t seed,
                                                 std::span<const double> sample_times) {
  for (std::size_t i = 1; i < sample_times.size(); ++i)
    if (sample_times[i] < sample_times[i - 1])
      throw ParamError("scaled_trajectory: sample_times must be nondecreasing");
  SimOptions options;
  options.record_trajectory = true;
  const RunReport run = simulate(params, policy, mode, seed, options);
  return sample_scaled(run, params.K(), sample_times);
}

/// sup over t in [0, horizon] of the max-norm distance between the scaled
/// run and the fluid solution. The run is piecewise constant and the fluid
/// path is monotone in each coordinate, so each piece attains its sup at an
/// endpoint. `horizon` must not exceed fluid.end_time().
inline double sup_deviation(const RunReport& run, int K, const FluidSolution& fluid, double horizon) {
  if (horizon > fluid.end_time() + 1e-12) throw ParamError("sup_deviation: horizon beyond the fluid solution");
  double worst = 0.0;
  double start = 0.0;
  int m = 0, n = run.N0;
  auto piece = [&](double a, double b) {
    const double cx = static_cast<double>(m) / K, cy = static_cast<double>(n) / K;
    for (const double t : {a, b}) {
      const FluidPoint f = fluid.at(std::min(t, fluid.end_time()));
      worst = std::max({worst, std::abs(cx - f.x), std::abs(cy - f.y)});
    }
  };
  for (const SimEvent& e : run.trajectory) {
    if (e.t > horizon) break;
    piece(start, e.t);
    start = e.t;
    m = e.m;
    n = e.n;
  }
  piece(start, horizon);
  return worst;
}

}  // namespace dtnf
