#pragma once

#include <cstdint>
#include <cmath>

namespace slipt {

/// Counter-based random source built on the splitmix64 finalizer.
///
/// Every draw is a pure function of (seed, stream, counter), so Monte Carlo
/// runs can be partitioned across workers in any way without changing the
/// result for a fixed seed: worker layout only decides who evaluates which
/// (stream, counter) pair.
struct CounterRng {
  std::uint64_t seed = 1;

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t raw(std::uint64_t stream, std::uint64_t counter) const {
    return mix(mix(seed + 0x9e3779b97f4a7c15ULL * (stream + 1)) + counter);
  }

  /// Uniform on (0, 1] — safe under log().
  double uniform_oc(std::uint64_t stream, std::uint64_t counter) const {
    return ((raw(stream, counter) >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform on [0, 1).
  double uniform_co(std::uint64_t stream, std::uint64_t counter) const {
    return (raw(stream, counter) >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes counters `counter` and `counter+1`.
  double normal(std::uint64_t stream, std::uint64_t counter) const {
    const double u1 = uniform_oc(stream, counter);
    const double u2 = uniform_co(stream, counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
};

}  // namespace slipt
