#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <span>
#include <thread>
#include <vector>

#include "dtnf/mdp/phi.hpp"
#include "dtnf/sim/gillespie.hpp"

namespace dtnf {

struct SampleStats {
  std::size_t count = 0;
  double mean = 0.0;
  /// Unbiased sample variance.
  double variance = 0.0;
  double std_error = 0.0;
  /// 95% normal-approximation interval.
  double ci_low = 0.0;
  double ci_high = 0.0;

  double half_width() const { return 0.5 * (ci_high - ci_low); }
};

/// Two-pass mean and variance with compensated sums, in index order.
inline SampleStats summarize(std::span<const double> v) {
  SampleStats s;
  s.count = v.size();
  if (v.empty()) return s;
  detail::CompensatedSum sum;
  for (const double x : v) sum.add(x);
  s.mean = sum.value() / static_cast<double>(v.size());
  if (v.size() > 1) {
    detail::CompensatedSum sq;
    for (const double x : v) sq.add((x - s.mean) * (x - s.mean));
    s.variance = sq.value() / static_cast<double>(v.size() - 1);
  }
  s.std_error = std::sqrt(s.variance / static_cast<double>(v.size()));
  constexpr double z95 = 1.959963984540054;
  s.ci_low = s.mean - z95 * s.std_error;
  s.ci_high = s.mean + z95 * s.std_error;
  return s;
}

struct CostStatistics {
  std::size_t replications = 0;
  SampleStats delay;
  SampleStats relay_copies;
  /// T_d + gamma * (relay copies + destination copies).
  SampleStats total_cost;
  /// T_d + gamma * (N0 + relay copies).
  SampleStats relay_energy_cost;
};

/// Worker count: `requested` (0 = hardware concurrency) capped by DTNF_THREADS.
inline unsigned worker_threads(unsigned requested = 0) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DTNF_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return std::max(1u, n);
}

/// Runs `count` independent jobs job(i) on up to `threads` workers. Results
/// land at their index, so the output does not depend on scheduling.
template <class Result, class Job>
std::vector<Result> parallel_indexed(std::size_t count, unsigned threads, Job job) {
  std::vector<Result> out(count);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_threads(threads), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = job(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) out[i] = job(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

template <class Runner>
std::vector<RunReport> run_replications(const Runner& runner, std::size_t replications, std::uint64_t seed,
                                        SimOptions options = {}, unsigned threads = 0) {
  return parallel_indexed<RunReport>(replications, threads,
                                     [&](std::size_t rep) { return runner.run(seed, rep, options); });
}

inline CostStatistics cost_statistics(std::span<const RunReport> runs) {
  std::vector<double> d, c, tc, rc;
  d.reserve(runs.size());
  c.reserve(runs.size());
  tc.reserve(runs.size());
  rc.reserve(runs.size());
  for (const RunReport& r : runs) {
    d.push_back(r.T_d);
    c.push_back(r.relay_copies);
    tc.push_back(r.total_cost);
    rc.push_back(r.relay_energy_cost);
  }
  CostStatistics s;
  s.replications = runs.size();
  s.delay = summarize(d);
  s.relay_copies = summarize(c);
  s.total_cost = summarize(tc);
  s.relay_energy_cost = summarize(rc);
  return s;
}

template <class Runner>
CostStatistics monte_carlo(const Runner& runner, std::size_t replications, std::uint64_t seed,
                           SimOptions options = {}, unsigned threads = 0) {
  if (replications < 2) throw ParamError("monte_carlo: replications must be >= 2");
  options.record_trajectory = false;
  const auto runs = run_replications(runner, replications, seed, options, threads);
  return cost_statistics(runs);
}

inline CostStatistics monte_carlo(const NetworkParams& params, const PolicySpec& policy, Relaying mode,
                                  std::size_t replications, std::uint64_t seed, SimOptions options = {},
                                  unsigned threads = 0) {
  return monte_carlo(Simulator(params, policy, mode), replications, seed, options, threads);
}

}  // namespace dtnf
