#pragma once

#include <cstdint>
#include <random>

namespace xyzmap {

/// Seeded generator with distribution code written out here, so draws are
/// identical across standard libraries (std::uniform_real_distribution is
/// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [lo, hi); returns lo when lo == hi.
  double uniform(double lo, double hi) {
    const double u = double(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = std::uint64_t(hi - lo) + 1;
    return lo + std::int64_t(engine_() % span);
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace xyzmap
