// Independent reference implementations used to pin expected values in the
// unit tests. Everything here is deliberately naive: direct quadrature,
// O(n^2) transforms, explicit complex arithmetic, high-order finite
// differences. None of it shares code with the library paths under test.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace testsupport {

using cxd = std::complex<double>;

// 40-node composite Gauss-Legendre quadrature of fn over [lo, hi].
inline double gauss_legendre(const std::function<double(double)>& fn, double lo,
                             double hi, std::size_t panels = 64) {
  // 5-point rule nodes/weights on [-1, 1].
  static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
  static const double ws[5] = {0.2369268850561891, 0.4786286704993665,
                               0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  const double panel = (hi - lo) / double(panels);
  double acc = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = lo + panel * double(p);
    const double mid = a + 0.5 * panel;
    for (int q = 0; q < 5; ++q) acc += ws[q] * fn(mid + 0.5 * panel * xs[q]);
  }
  return acc * 0.5 * panel;
}

// Direct O(n^2) discrete Fourier transform, sign -1 = analysis.
inline std::vector<cxd> direct_dft(const std::vector<cxd>& in, int sign) {
  const std::size_t n = in.size();
  std::vector<cxd> out(n, cxd(0.0, 0.0));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t m = 0; m < n; ++m) {
      const double ang = double(sign) * 2.0 * std::numbers::pi * double(j) *
                         double(m) / double(n);
      out[j] += in[m] * std::polar(1.0, ang);
    }
  return out;
}

// Signed wavenumber of mode j on an n-point axis of length L (Nyquist +).
inline double mode_wavenumber(std::size_t j, std::size_t n, double L) {
  const long long s = (j <= n / 2) ? (long long)j : (long long)j - (long long)n;
  return 2.0 * std::numbers::pi * double(s) / L;
}

// Scalar symbol of F_k with constant coefficient c on the plane wave
// exp(i kappa x): spelled out term by term from the shift/multiply
// definition, (e^{-i kappa tau} - 1)-bar style factors kept explicit.
inline cxd fk_plane_wave_symbol(double t, std::size_t k, double c, double kappa) {
  const double tau = std::pow(t, 1.0 / double(2 * k));
  // (I - A(tau)*) multiplies the wave by (1 - e^{-i kappa tau});
  // (A(tau) - I) multiplies it by (e^{i kappa tau} - 1).
  const cxd left = std::polar(1.0, kappa * tau) - cxd(1.0, 0.0);
  const cxd right = cxd(1.0, 0.0) - std::polar(1.0, -kappa * tau);
  cxd sym(1.0, 0.0);
  for (std::size_t i = 0; i < k; ++i) sym *= left * right;
  return c * sym;
}

// Centered finite-difference of order-8 accuracy for the m-th derivative
// (m = 1 or 2) on a periodic sample vector with spacing h.
inline std::vector<double> fd8_derivative(const std::vector<double>& v, double h,
                                          int order) {
  const std::size_t n = v.size();
  std::vector<double> out(n, 0.0);
  // 9-point stencils, accuracy O(h^8).
  static const double c1[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  static const double c2_0 = -205.0 / 72.0;
  static const double c2[4] = {8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
  for (std::size_t i = 0; i < n; ++i) {
    auto at = [&](long long off) {
      return v[std::size_t(((long long)i + off % (long long)n + (long long)n) %
                           (long long)n)];
    };
    double acc = 0.0;
    if (order == 1) {
      for (int s = 1; s <= 4; ++s) acc += c1[s - 1] * (at(s) - at(-s));
      acc /= h;
    } else {
      acc = c2_0 * at(0);
      for (int s = 1; s <= 4; ++s) acc += c2[s - 1] * (at(s) + at(-s));
      acc /= h * h;
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace testsupport
