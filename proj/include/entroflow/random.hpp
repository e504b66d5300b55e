#pragma once

#include <cstdint>
#include <random>

namespace entroflow {

/// Seeded generator for the reproducible test banks.
///
/// The engine is std::mt19937_64 (fully specified by the C++ standard). The
/// conversion to doubles is done here rather than with the standard
/// distributions, whose algorithms are implementation-defined: a uniform on
/// [0, 1) is the top 53 bits of one engine output times 2^-53.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace entroflow
