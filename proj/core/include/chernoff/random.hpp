#pragma once

#include <cstdint>
#include <random>

#include "chernoff/grid.hpp"

namespace chernoff {

/// Deterministic Gaussian source. Uses mt19937_64 plus an explicit
/// Box-Muller transform so sequences do not depend on the C++ runtime's
/// distribution implementation.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform();
  /// Standard normal.
  double normal();

  /// Mix extra words into a child seed (for per-trial derivation).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Complex field with i.i.d. standard complex Gaussian entries.
WaveFunction random_state(const GridPtr& grid, std::uint64_t seed);

/// Smooth real random field: base + sum over low modes (|mode| <= max_mode per
/// axis) of Gaussian-weighted cosines, scaled to peak amplitude `amplitude`.
SampledField random_smooth_field(const GridPtr& grid, std::uint64_t seed,
                                 std::size_t max_mode, double amplitude,
                                 double base = 0.0);

}  // namespace chernoff
