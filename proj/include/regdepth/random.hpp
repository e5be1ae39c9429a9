#pragma once

#include <cstdint>

namespace regdepth {

/// Stafford "mix13" finalizer used by SplitMix64.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// SplitMix64 (Steele, Lea, Flood 2014): state advances by the golden
/// gamma 0x9e3779b97f4a7c15 and each output is mix64(state).
///
/// Uniforms are (top 53 bits + 0.5) / 2^53, strictly inside (0, 1); normal
/// variates use the inverse CDF (Wichura AS 241) so a stream can be
/// reproduced in any language with IEEE doubles.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
  double normal() { return normal_quantile(uniform()); }
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  static double normal_quantile(double u);

 private:
  std::uint64_t state_;
};

/// Seed of replicate `index` under `master`: mix64(mix64(master) XOR index).
/// Mixing the master first keeps small masters from sharing replicate
/// seeds (1 ^ i and 2 ^ i run over the same set for i < 1024).
constexpr std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ index);
}

}  // namespace regdepth
