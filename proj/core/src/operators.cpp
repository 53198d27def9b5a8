#include "chernoff/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"

namespace chernoff {
namespace {

constexpr double underflow_floor = 1e-300;

void check_time(double t) {
  if (!std::isfinite(t) || t < 0.0)
    throw std::invalid_argument("operator family: t must be finite and >= 0");
}

void check_field_grid(const SampledField& field, const WaveFunction& f,
                      const char* what) {
  if (!same_grid(field.grid, f.grid()))
    throw std::invalid_argument(std::string(what) + ": field and state grids differ");
}

std::vector<cxd> zeros_like(const WaveFunction& f) {
  return std::vector<cxd>(f.size(), cxd(0.0, 0.0));
}

double binom(std::size_t k, std::size_t j) {
  double c = 1.0;
  for (std::size_t i = 0; i < j; ++i) c = c * double(k - i) / double(i + 1);
  return c;
}

// Shift offsets tau_k = t^(1/2k), or t^(1/k) under the broken-root fault.
double root_offset(double t, std::size_t k, bool broken) {
  const double e = broken ? 1.0 / double(k) : 1.0 / double(2 * k);
  return std::pow(t, e);
}

}  // namespace

RegulatorFn RegulatorFn::arctan() {
  return RegulatorFn(RegulatorKind::arctan, "arctan",
                     [](double z) { return std::atan(z); }, std::numbers::pi / 2);
}

RegulatorFn RegulatorFn::sine() {
  return RegulatorFn(RegulatorKind::sine, "sin",
                     [](double z) { return std::sin(z); }, 1.0);
}

RegulatorFn RegulatorFn::tanh() {
  return RegulatorFn(RegulatorKind::tanh, "tanh",
                     [](double z) { return std::tanh(z); }, 1.0);
}

RegulatorFn RegulatorFn::custom(std::string name, std::function<double(double)> eval,
                                double bound_M) {
  if (!eval) throw std::invalid_argument("regulator: eval function must be set");
  if (!(bound_M > 0.0) || !std::isfinite(bound_M))
    throw std::invalid_argument("regulator invariant violated: bound M must be positive and finite");
  if (eval(0.0) != 0.0) {
    std::ostringstream os;
    os << "regulator invariant violated: w(0) = " << eval(0.0) << " (must be 0)";
    throw std::invalid_argument(os.str());
  }
  // Unit slope at the origin: |w(z)/z - 1| <= 1e-6 near 0.
  for (double z : {1e-4, 1e-5, 1e-6, -1e-4, -1e-5, -1e-6}) {
    const double r = eval(z) / z;
    if (!(std::abs(r - 1.0) <= 1e-6)) {
      std::ostringstream os;
      os << "regulator invariant violated: w(z)/z = " << r << " at z = " << z
         << " (w'(0) must be 1)";
      throw std::invalid_argument(os.str());
    }
  }
  // Boundedness spot check on a log-spaced sample; the exhaustive sweep is a
  // test-suite property.
  for (double mag = 1e-8; mag <= 1.0e8; mag *= 10.0) {
    for (double z : {mag, -mag}) {
      const double v = eval(z);
      if (!std::isfinite(v) || std::abs(v) > bound_M * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "regulator invariant violated: |w(" << z << ")| = " << std::abs(v)
           << " exceeds declared bound M = " << bound_M;
        throw std::invalid_argument(os.str());
      }
    }
  }
  return RegulatorFn(RegulatorKind::custom, std::move(name), std::move(eval), bound_M);
}

CoefficientSet::CoefficientSet(SampledField a0, std::vector<SampledField> a_higher)
    : a0_(std::move(a0)), a_(std::move(a_higher)) {
  if (a_.size() > max_coefficient_order) {
    std::ostringstream os;
    os << "CoefficientSet: order K = " << a_.size() << " exceeds the supported cap "
       << max_coefficient_order;
    throw std::invalid_argument(os.str());
  }
  for (const auto& f : a_)
    if (!same_grid(f.grid, a0_.grid))
      throw std::invalid_argument("CoefficientSet: coefficient grids differ");
}

bool CoefficientSet::constant_higher() const noexcept {
  return std::all_of(a_.begin(), a_.end(),
                     [](const SampledField& f) { return f.is_constant(); });
}

Potential::Potential(SampledField f, bool claim_nonneg)
    : field(std::move(f)), nonneg(claim_nonneg) {
  if (nonneg && field.min_value < 0.0) {
    std::ostringstream os;
    os << "Potential: claimed nonnegative but min V = " << field.min_value;
    throw std::invalid_argument(os.str());
  }
}

HamiltonianSpec::HamiltonianSpec(OneDSpec s) : v_(std::move(s)) {
  if (std::get<OneDSpec>(v_).coeffs.grid()->dim() != 1)
    throw std::invalid_argument("OneD spec requires a 1-dimensional grid");
}

HamiltonianSpec::HamiltonianSpec(MultiDSpec s) : v_(std::move(s)) {
  const auto& m = std::get<MultiDSpec>(v_);
  if (m.a == 0.0 || !std::isfinite(m.a))
    throw std::invalid_argument("MultiD spec: parameter a must be nonzero and finite");
  if (!m.potential.nonneg && m.potential.field.min_value < 0.0 &&
      !m.self_adjoint_override) {
    std::ostringstream os;
    os << "MultiD spec: potential has negative parts (min V = "
       << m.potential.field.min_value
       << "); essential self-adjointness is only guaranteed for V >= 0. "
          "Set self_adjoint_override to accept.";
    throw std::invalid_argument(os.str());
  }
}

const GridPtr& HamiltonianSpec::grid() const noexcept {
  return is_oned() ? oned().coeffs.grid() : multid().potential.field.grid;
}

const RegulatorFn& HamiltonianSpec::regulator() const noexcept {
  return is_oned() ? oned().regulator : multid().regulator;
}

WaveFunction apply_mult(const SampledField& field, const WaveFunction& f) {
  check_field_grid(field, f, "apply_mult");
  std::vector<cxd> out(f.values().begin(), f.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= field.values[i];
  return WaveFunction(f.grid(), std::move(out));
}

WaveFunction apply_F0(double t, const SampledField& a0, const RegulatorFn& w,
                      int sign, const WaveFunction& f) {
  check_time(t);
  check_field_grid(a0, f, "apply_F0");
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("apply_F0: sign must be +1 or -1");
  std::vector<cxd> out(f.values().begin(), f.values().end());
  const double st = double(sign) * t;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= w(st * a0.values[i]);
  return WaveFunction(f.grid(), std::move(out));
}

WaveFunction apply_Fk_composed(double t, std::size_t k, const SampledField& ak,
                               const WaveFunction& f) {
  check_time(t);
  check_field_grid(ak, f, "apply_Fk");
  if (k < 1 || k > max_coefficient_order)
    throw std::invalid_argument("apply_Fk: k must be in [1, 8]");
  if (f.grid()->dim() != 1)
    throw std::invalid_argument("apply_Fk: one-dimensional grids only");
  if (t < underflow_floor) return WaveFunction(f.grid(), zeros_like(f));

  const double tau = root_offset(t, k, false);
  // (I - A(tau)*)^k
  WaveFunction g = f;
  for (std::size_t i = 0; i < k; ++i) {
    WaveFunction shifted = spectral_shift(g, 0, -tau);
    auto& gv = detail::WfAccess::raw(g);
    const auto sv = shifted.values();
    for (std::size_t p = 0; p < gv.size(); ++p) gv[p] -= sv[p];
  }
  g = apply_mult(ak, g);
  // (A(tau) - I)^k
  for (std::size_t i = 0; i < k; ++i) {
    WaveFunction shifted = spectral_shift(g, 0, tau);
    auto& sv = detail::WfAccess::raw(shifted);
    const auto gv = g.values();
    for (std::size_t p = 0; p < sv.size(); ++p) sv[p] -= gv[p];
    g = std::move(shifted);
  }
  return g;
}

WaveFunction apply_Fk_binomial(double t, std::size_t k, const SampledField& ak,
                               const WaveFunction& f) {
  check_time(t);
  check_field_grid(ak, f, "apply_Fk");
  if (k < 1 || k > max_coefficient_order)
    throw std::invalid_argument("apply_Fk: k must be in [1, 8]");
  if (f.grid()->dim() != 1)
    throw std::invalid_argument("apply_Fk: one-dimensional grids only");
  if (t < underflow_floor) return WaveFunction(f.grid(), zeros_like(f));

  const double tau = root_offset(t, k, false);
  std::vector<cxd> acc = zeros_like(f);
  for (std::size_t j1 = 0; j1 <= k; ++j1) {
    WaveFunction m = apply_mult(ak, spectral_shift(f, 0, -double(j1) * tau));
    for (std::size_t j2 = 0; j2 <= k; ++j2) {
      const double sign = ((j1 + k - j2) % 2 == 0) ? 1.0 : -1.0;
      const double coeff = sign * binom(k, j1) * binom(k, j2);
      WaveFunction term = spectral_shift(m, 0, double(j2) * tau);
      const auto tv = term.values();
      for (std::size_t p = 0; p < acc.size(); ++p) acc[p] += coeff * tv[p];
    }
  }
  return WaveFunction(f.grid(), std::move(acc));
}

WaveFunction apply_F(double t, const HamiltonianSpec& spec, const WaveFunction& f,
                     const FaultInjection& fault) {
  check_time(t);
  if (!spec.is_oned())
    throw std::invalid_argument("apply_F: OneD spec required (use apply_W)");
  if (!same_grid(spec.grid(), f.grid()))
    throw std::invalid_argument("apply_F: spec and state grids differ");
  const auto& coeffs = spec.oned().coeffs;
  const std::size_t K = coeffs.order();

  WaveFunction out = apply_F0(t, coeffs.a0(), spec.oned().regulator, +1, f);
  if (t < underflow_floor || K == 0) return out;

  auto& ov = detail::WfAccess::raw(out);
  const Grid& g = *f.grid();

  if (coeffs.constant_higher()) {
    // All a_k constant: every F_k is diagonal in Fourier space with symbol
    // a_k (2 cos(kappa tau_k) - 2)^k; one round trip evaluates the whole sum.
    const auto kappa = g.wavenumbers(0);
    const std::size_t n = g.n(0);
    std::vector<cxd> mult(n);
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 1; k <= K; ++k) {
        const double tau = root_offset(t, k, fault.broken_shift_root);
        const double base = 2.0 * std::cos(kappa[j] * tau) - 2.0;
        double p = 1.0;
        for (std::size_t q = 0; q < k; ++q) p *= base;
        s += coeffs.a(k).values[0] * p;
      }
      mult[j] = cxd(s / double(n), 0.0);
    }
    std::vector<cxd> work(f.values().begin(), f.values().end());
    detail::spectral_filter_axis(g, 0, mult.data(), work.data());
    for (std::size_t p = 0; p < ov.size(); ++p) ov[p] += work[p];
    return out;
  }

  for (std::size_t k = 1; k <= K; ++k) {
    const double tau = root_offset(t, k, fault.broken_shift_root);
    // Literal composition with the (possibly fault-injected) offset.
    WaveFunction w = f;
    for (std::size_t i = 0; i < k; ++i) {
      WaveFunction shifted = spectral_shift(w, 0, -tau);
      auto& wv = detail::WfAccess::raw(w);
      const auto sv = shifted.values();
      for (std::size_t p = 0; p < wv.size(); ++p) wv[p] -= sv[p];
    }
    w = apply_mult(coeffs.a(k), w);
    for (std::size_t i = 0; i < k; ++i) {
      WaveFunction shifted = spectral_shift(w, 0, tau);
      auto& sv = detail::WfAccess::raw(shifted);
      const auto wv = w.values();
      for (std::size_t p = 0; p < sv.size(); ++p) sv[p] -= wv[p];
      w = std::move(shifted);
    }
    const auto wv = w.values();
    for (std::size_t p = 0; p < ov.size(); ++p) ov[p] += wv[p];
  }
  return out;
}

WaveFunction apply_W(double t, const HamiltonianSpec& spec, const WaveFunction& f,
                     const FaultInjection& fault) {
  check_time(t);
  if (spec.is_oned())
    throw std::invalid_argument("apply_W: MultiD spec required (use apply_F)");
  if (!same_grid(spec.grid(), f.grid()))
    throw std::invalid_argument("apply_W: spec and state grids differ");

  const Grid& g = *f.grid();
  const std::size_t d = g.dim();
  const double sd = std::sqrt(double(d));
  const double off = fault.broken_shift_root ? sd * t : sd * std::sqrt(t);

  // w(-t V) part.
  WaveFunction out = apply_F0(t, spec.multid().potential.field,
                              spec.multid().regulator, -1, f);
  auto& ov = detail::WfAccess::raw(out);

  if (off != 0.0) {
    // Per axis, the centered stencil (A(off) + A(off)* - 2I)/(2d) is one
    // spectral filter with the real symbol (2 cos(kappa off) - 2)/(2d).
    for (std::size_t axis = 0; axis < d; ++axis) {
      const auto kappa = g.wavenumbers(axis);
      const std::size_t n = g.n(axis);
      std::vector<cxd> mult(n);
      const double scale = 1.0 / (2.0 * double(d) * double(n));
      for (std::size_t j = 0; j < n; ++j)
        mult[j] = cxd((2.0 * std::cos(kappa[j] * off) - 2.0) * scale, 0.0);
      std::vector<cxd> work(f.values().begin(), f.values().end());
      detail::spectral_filter_axis(g, axis, mult.data(), work.data());
      for (std::size_t p = 0; p < ov.size(); ++p) ov[p] += work[p];
    }
  }
  return out;
}

WaveFunction apply_H(const HamiltonianSpec& spec, const WaveFunction& f) {
  if (!same_grid(spec.grid(), f.grid()))
    throw std::invalid_argument("apply_H: spec and state grids differ");
  const Grid& g = *f.grid();

  if (spec.is_oned()) {
    const auto& coeffs = spec.oned().coeffs;
    WaveFunction out = apply_mult(coeffs.a0(), f);
    auto& ov = detail::WfAccess::raw(out);
    const auto kappa = g.wavenumbers(0);
    const std::size_t n = g.n(0);
    std::vector<cxd> dk(n);
    for (std::size_t k = 1; k <= coeffs.order(); ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        cxd p(1.0, 0.0);
        const cxd ik(0.0, kappa[j]);
        for (std::size_t q = 0; q < k; ++q) p *= ik;
        dk[j] = p / double(n);
      }
      std::vector<cxd> work(f.values().begin(), f.values().end());
      detail::spectral_filter_axis(g, 0, dk.data(), work.data());
      WaveFunction mid = apply_mult(coeffs.a(k), WaveFunction(f.grid(), std::move(work)));
      std::vector<cxd> w2(mid.values().begin(), mid.values().end());
      detail::spectral_filter_axis(g, 0, dk.data(), w2.data());
      for (std::size_t p = 0; p < ov.size(); ++p) ov[p] += w2[p];
    }
    return out;
  }

  // MultiD: (1/2) Laplacian - V.
  const auto& mspec = spec.multid();
  std::vector<cxd> acc(f.size(), cxd(0.0, 0.0));
  for (std::size_t axis = 0; axis < g.dim(); ++axis) {
    const auto kappa = g.wavenumbers(axis);
    const std::size_t n = g.n(axis);
    std::vector<cxd> mult(n);
    for (std::size_t j = 0; j < n; ++j)
      mult[j] = cxd(-0.5 * kappa[j] * kappa[j] / double(n), 0.0);
    std::vector<cxd> work(f.values().begin(), f.values().end());
    detail::spectral_filter_axis(g, axis, mult.data(), work.data());
    for (std::size_t p = 0; p < acc.size(); ++p) acc[p] += work[p];
  }
  const auto& V = mspec.potential.field.values;
  const auto fv = f.values();
  for (std::size_t p = 0; p < acc.size(); ++p) acc[p] -= V[p] * fv[p];
  return WaveFunction(f.grid(), std::move(acc));
}

namespace {

double center_sq(const Grid& g, std::span<const double> x) {
  double r2 = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m) {
    const double c = x[m] - 0.5 * g.length(m);
    r2 += c * c;
  }
  return r2;
}

}  // namespace

HamiltonianSpec make_preset(std::string_view name, const GridPtr& grid,
                            const RegulatorFn& w, double a) {
  const Grid& g = *grid;
  auto potential_spec = [&](std::function<double(std::span<const double>)> fn) {
    return HamiltonianSpec(MultiDSpec{Potential(sample_real(grid, fn), true), w, a});
  };

  if (name == "free")
    return potential_spec([](std::span<const double>) { return 0.0; });
  if (name == "harmonic")
    return potential_spec([&g](std::span<const double> x) { return 0.5 * center_sq(g, x); });
  if (name == "quartic")
    return potential_spec([&g](std::span<const double> x) {
      const double r2 = center_sq(g, x);
      return r2 * r2;
    });
  if (name == "anharmonic")
    return potential_spec([&g](std::span<const double> x) {
      const double r2 = center_sq(g, x);
      return r2 + r2 * r2;
    });
  if (name == "sturm-liouville") {
    if (g.dim() != 1)
      throw std::invalid_argument("preset sturm-liouville requires a 1-d grid");
    const double L = g.length(0);
    auto q = sample_real(grid, [&g](std::span<const double> x) { return center_sq(g, x); });
    auto p = sample_real(grid, [L](std::span<const double> x) {
      return 1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * x[0] / L);
    });
    return HamiltonianSpec(OneDSpec{CoefficientSet(std::move(q), {std::move(p)}), w});
  }
  if (name == "momentum-poly") {
    // Momentum-polynomial model V(P) + X^2/2 for V(y) = y^2 + y^4: in the
    // position representation V(-i d/dx) = -d^2 + d^4, i.e. a1 = -1, a2 = +1.
    if (g.dim() != 1)
      throw std::invalid_argument("preset momentum-poly requires a 1-d grid");
    auto a0 = sample_real(grid, [&g](std::span<const double> x) { return 0.5 * center_sq(g, x); });
    auto a1 = sample_real(grid, [](std::span<const double>) { return -1.0; });
    auto a2 = sample_real(grid, [](std::span<const double>) { return 1.0; });
    return HamiltonianSpec(
        OneDSpec{CoefficientSet(std::move(a0), {std::move(a1), std::move(a2)}), w});
  }

  std::ostringstream os;
  os << "unknown preset '" << name << "'; available:";
  for (const auto& p : preset_names()) os << " " << p;
  throw std::invalid_argument(os.str());
}

std::vector<std::string> preset_names() {
  return {"free", "harmonic", "quartic", "anharmonic", "sturm-liouville", "momentum-poly"};
}

}  // namespace chernoff
