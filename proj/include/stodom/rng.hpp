#pragma once

#include <cmath>
#include <cstdint>

namespace stodom {

// Splittable pseudo-random streams built on the splitmix64 permutation.
// Every replica, sweep or site gets its own stream via derive_seed, so runs
// are reproducible and independent of thread scheduling.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1], safe as a log argument.
  double next_double_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  double next_exponential(double rate) { return -std::log(next_double_pos()) / rate; }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // 128-bit multiply rejection-free shortcut; bias < 2^-64, irrelevant here.
    return static_cast<std::uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace stodom
