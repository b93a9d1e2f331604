#pragma once

#include <cstdint>
#include <random>

namespace netkernel {

/// Deterministic random source. mt19937_64 output is pinned by the
/// standard, and draws avoid std distributions (whose sequences are not),
/// so a seed reproduces bit-identical streams everywhere.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [lo, hi], inclusive.
  long long uniform(long long lo, long long hi) {
    return lo + static_cast<long long>(engine_() % std::uint64_t(hi - lo + 1));
  }

  /// Uniform nonzero integer in [-mag, mag].
  long long nonzero(long long mag) {
    long long v = uniform(1, 2 * mag);
    return v <= mag ? v : mag - v; // 1..mag, then -1..-mag
  }

  std::uint64_t raw() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

} // namespace netkernel
