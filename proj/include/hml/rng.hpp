#pragma once
#include <cmath>
#include <cstdint>

namespace hml {

// splitmix64. Chosen over <random> engines so that streams are identical
// across platforms and standard-library versions; every randomized routine
// in the harness derives its stream from (master seed, stream tag, index)
// and is therefore independent of scheduling order.
struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Inclusive range. Modulo bias is irrelevant at harness scale.
  long long uniform_int(long long lo, long long hi) {
    return lo + (long long)(next() % (std::uint64_t)(hi - lo + 1));
  }

  // Box-Muller, two uniforms per call, no cached second value.
  double gaussian() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692 * u2);
  }

  int sign() { return (next() & 1) ? 1 : -1; }
};

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  Rng a(master ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
  std::uint64_t x = a.next();
  Rng b(x ^ (0xbf58476d1ce4e5b9ULL * (index + 1)));
  return b.next();
}

}  // namespace hml
