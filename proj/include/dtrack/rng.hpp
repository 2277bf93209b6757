#pragma once

#include <cmath>
#include <cstdint>

#include "dtrack/types.hpp"

namespace dtrack {

// Self-contained splitmix64 generator.  The standard library distributions are
// implementation-defined, and runs must be byte-identical across toolchains,
// so both the stream and the normal transform are fixed here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // inclusive on both ends
  int uniform_int(int lo, int hi) {
    int span = hi - lo + 1;
    int v = lo + static_cast<int>(uniform() * span);
    return v > hi ? hi : v;
  }

  // Box-Muller, no caching so the consumed-stream length is predictable
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  Vec3 normal3() {
    Vec3 v;
    for (int i = 0; i < 3; ++i) v(i) = normal();
    return v;
  }

  Vec6 normal6() {
    Vec6 v;
    for (int i = 0; i < 6; ++i) v(i) = normal();
    return v;
  }

  // splittable counter scheme: adding trials never perturbs earlier ones
  static std::uint64_t derive(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

}  // namespace dtrack
