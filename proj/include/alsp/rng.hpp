/// @file rng.hpp
/// @brief Seeded uniform generator with a fixed bit mapping.
///
/// std::mt19937_64 output is pinned by the standard, but the std distribution
/// adapters are implementation-defined; mapping the raw 64-bit draws manually
/// keeps generated problems byte-identical across toolchains.

#pragma once

#include <cstdint>
#include <random>

namespace alsp {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0,1) with 53-bit resolution.
  double unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace alsp
