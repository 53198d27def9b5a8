#include "chernoff/random.hpp"

#include <cmath>
#include <numbers>

namespace chernoff {

double Rng::uniform() {
  // 53-bit mantissa fill, uniform on [0, 1).
  return double(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the mixed words.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

WaveFunction random_state(const GridPtr& grid, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<cxd> v(grid->size());
  for (auto& z : v) {
    const double re = rng.normal();
    const double im = rng.normal();
    z = cxd(re, im);
  }
  return WaveFunction(grid, std::move(v));
}

SampledField random_smooth_field(const GridPtr& grid, std::uint64_t seed,
                                 std::size_t max_mode, double amplitude,
                                 double base) {
  Rng rng(seed);
  const Grid& g = *grid;
  const std::size_t d = g.dim();
  // Random low-mode cosine amplitudes and phases per axis, combined additively.
  std::vector<std::vector<double>> amp(d), phase(d);
  for (std::size_t m = 0; m < d; ++m) {
    amp[m].resize(max_mode);
    phase[m].resize(max_mode);
    for (std::size_t q = 0; q < max_mode; ++q) {
      amp[m][q] = rng.normal() / double(q + 1);
      phase[m][q] = 2.0 * std::numbers::pi * rng.uniform();
    }
  }
  std::vector<double> v(g.size(), 0.0);
  std::vector<std::size_t> idx(d);
  double peak = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.decode(i, idx);
    double s = 0.0;
    for (std::size_t m = 0; m < d; ++m) {
      const double x = g.coord(m, idx[m]);
      const double w0 = 2.0 * std::numbers::pi / g.length(m);
      for (std::size_t q = 0; q < max_mode; ++q)
        s += amp[m][q] * std::cos(w0 * double(q + 1) * x + phase[m][q]);
    }
    v[i] = s;
    peak = std::max(peak, std::abs(s));
  }
  const double scale = peak > 0.0 ? amplitude / peak : 0.0;
  for (auto& x : v) x = base + scale * x;
  return SampledField(grid, std::move(v));
}

}  // namespace chernoff
