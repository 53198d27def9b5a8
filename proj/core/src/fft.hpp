#pragma once

// Internal spectral backend (FFTW3). Not installed.

#include "chernoff/grid.hpp"

namespace chernoff::detail {

// Unnormalized in-place DFT along one axis of row-major data.
// sign -1: analysis direction (matches exp(-i kappa x) weights);
// sign +1: synthesis. A -1/+1 round trip scales by n(axis).
void dft_axis(const Grid& g, std::size_t axis, int sign, cxd* data);

// Multiply mode j along an axis by multiplier[j] (pointwise in spectral
// space): analysis, scale, synthesis, with the 1/n normalization folded in.
void spectral_filter_axis(const Grid& g, std::size_t axis,
                          const cxd* multiplier, cxd* data);

// Full d-dimensional unnormalized DFT (axis by axis).
void dft_all(const Grid& g, int sign, cxd* data);

// Mutable access to WaveFunction storage for library internals.
struct WfAccess {
  static std::vector<cxd>& raw(WaveFunction& f) { return f.values_; }
};

}  // namespace chernoff::detail
