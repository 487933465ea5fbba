#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "pdmcausal/tensor.hpp"

namespace pdmcausal {

/// Seed for the `index`-th independent task of a run seeded with `seed`.
/// Each task owns its own generator, so results do not depend on how tasks
/// are scheduled across threads.
constexpr std::uint64_t task_seed(std::uint64_t seed, std::uint64_t index) { return seed ^ index; }

/// Explicitly passed random source. Gaussian draws use Box–Muller on top of
/// the raw 64-bit engine output so that streams are bit-identical across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on (0, 1].
  double uniform() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  /// Standard complex Gaussian, E|z|² = 1.
  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pdmcausal
