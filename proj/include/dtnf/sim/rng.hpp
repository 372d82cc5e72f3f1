#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace dtnf {

/// SplitMix64 (Steele, Lea, Flood 2014). Each replication gets its own stream
/// keyed by (seed, replication index), so runs are reproducible and
/// independent of how replications are scheduled across threads.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  SplitMix64(std::uint64_t seed, std::uint64_t stream) : state_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Exponential with the given rate (> 0).
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Seed reported for replication `rep` of a run seeded with `seed`.
inline std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t rep) {
  return SplitMix64::mix(seed ^ SplitMix64::mix(rep + 0x632be59bd9b4e019ULL));
}

}  // namespace dtnf
