#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace tinfv {

// Counter-free splittable generator. Every entity in a scenario draws from its
// own stream keyed by (seed, tags...), so adding users or subcarriers leaves
// the draws of existing ones untouched.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags)
  {
    std::uint64_t h = mix(seed ^ 0x6a09e667f3bcc909ULL);
    for (auto t : tags) h = mix(h ^ mix(t + 0x9e3779b97f4a7c15ULL));
    return Rng(h);
  }

  std::uint64_t next_u64()
  {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

  /// Unit-mean exponential: the power of a unit-power Rayleigh amplitude.
  double exponential() { return -std::log1p(-uniform()); }

private:
  static std::uint64_t mix(std::uint64_t z)
  {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace tinfv
