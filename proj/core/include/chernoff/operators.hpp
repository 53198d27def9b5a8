#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chernoff/grid.hpp"

namespace chernoff {

enum class RegulatorKind { arctan, sine, tanh, custom };

/// Bounded regulator w: R -> R with w(0) = 0, w'(0) = 1 and |w| <= bound().
/// Custom regulators are validated at construction (violations throw
/// std::invalid_argument naming the failed invariant).
class RegulatorFn {
public:
  static RegulatorFn arctan();  // bound pi/2
  static RegulatorFn sine();    // bound 1
  static RegulatorFn tanh();    // bound 1
  static RegulatorFn custom(std::string name, std::function<double(double)> eval,
                            double bound_M);

  double operator()(double z) const { return eval_(z); }
  double bound() const noexcept { return bound_; }
  RegulatorKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

private:
  RegulatorFn(RegulatorKind k, std::string name, std::function<double(double)> eval,
              double bound)
      : kind_(k), name_(std::move(name)), eval_(std::move(eval)), bound_(bound) {}
  RegulatorKind kind_;
  std::string name_;
  std::function<double(double)> eval_;
  double bound_;
};

inline constexpr std::size_t max_coefficient_order = 8;

/// Coefficients of the order-2K one-dimensional operator
/// Hf = a_0 f + sum_{k=1..K} d^k(a_k d^k f). Fields share one grid; the
/// order K is capped at max_coefficient_order.
class CoefficientSet {
public:
  CoefficientSet(SampledField a0, std::vector<SampledField> a_higher);

  const GridPtr& grid() const noexcept { return a0_.grid; }
  std::size_t order() const noexcept { return a_.size(); }  // K
  const SampledField& a0() const noexcept { return a0_; }
  /// k in [1, K].
  const SampledField& a(std::size_t k) const { return a_.at(k - 1); }
  /// Recorded max |a_k|, k in [1, K].
  double max_abs(std::size_t k) const { return a_.at(k - 1).max_abs(); }
  /// True when every a_k, k >= 1, is a constant field.
  bool constant_higher() const noexcept;

private:
  SampledField a0_;
  std::vector<SampledField> a_;
};

/// Multiplication potential V. If nonneg is claimed it is validated.
struct Potential {
  SampledField field;
  bool nonneg = false;

  Potential(SampledField f, bool claim_nonneg);
};

struct OneDSpec {
  CoefficientSet coeffs;
  RegulatorFn regulator;
};

struct MultiDSpec {
  Potential potential;
  RegulatorFn regulator;
  double a = 1.0;                     // equation parameter in psi_t = i a H psi
  bool self_adjoint_override = false; // accept V with negative parts
};

/// Validated union of the two operator families.
/// OneD requires a 1-dimensional grid. MultiD requires a != 0 and a
/// nonnegative potential unless self_adjoint_override is set.
class HamiltonianSpec {
public:
  HamiltonianSpec(OneDSpec s);
  HamiltonianSpec(MultiDSpec s);

  bool is_oned() const noexcept { return std::holds_alternative<OneDSpec>(v_); }
  const OneDSpec& oned() const { return std::get<OneDSpec>(v_); }
  const MultiDSpec& multid() const { return std::get<MultiDSpec>(v_); }
  const GridPtr& grid() const noexcept;
  const RegulatorFn& regulator() const noexcept;

private:
  std::variant<OneDSpec, MultiDSpec> v_;
};

/// Test-harness fault injection: replace the root exponent t^(1/2k) of the
/// shift offsets by t^(1/k), breaking Chernoff tangency while keeping the
/// operator bounded and self-adjoint.
struct FaultInjection {
  bool broken_shift_root = false;
};

/// Pointwise multiplication by a real field. Grids must match.
WaveFunction apply_mult(const SampledField& field, const WaveFunction& f);

/// F_0(t): multiplication by w(sign * t * a0(x)).
WaveFunction apply_F0(double t, const SampledField& a0, const RegulatorFn& w,
                      int sign, const WaveFunction& f);

/// F_k(t) = (A(tau) - I)^k B_{a_k} (I - A(tau)*)^k with tau = t^(1/2k),
/// evaluated as k shift-difference sweeps, one multiplication, k sweeps.
/// (A(tau)f)(x) = f(x + tau); A(tau)* = A(-tau). Requires t >= 0; t below
/// 1e-300 yields the zero field (underflow guard).
WaveFunction apply_Fk_composed(double t, std::size_t k, const SampledField& ak,
                               const WaveFunction& f);

/// Same operator through the expanded double-binomial sum
/// sum_{j1,j2} C(k,j1) C(k,j2) (-1)^{j1 + k - j2} A^{j2} B_{a_k} A*^{j1}.
WaveFunction apply_Fk_binomial(double t, std::size_t k, const SampledField& ak,
                               const WaveFunction& f);

/// OneD family: F(t) = F_0(t) + sum_k F_k(t) with w(+t a0).
WaveFunction apply_F(double t, const HamiltonianSpec& spec, const WaveFunction& f,
                     const FaultInjection& fault = {});

/// MultiD family: (W(t)f)(x) = (1/2d) sum_j [f(x + sqrt(d t) e_j)
/// + f(x - sqrt(d t) e_j) - 2 f(x)] + w(-t V(x)) f(x).
WaveFunction apply_W(double t, const HamiltonianSpec& spec, const WaveFunction& f,
                     const FaultInjection& fault = {});

/// Generator by spectral differentiation: OneD sum_k D^k(a_k D^k f) + a0 f;
/// MultiD (1/2) Laplacian f - V f.
WaveFunction apply_H(const HamiltonianSpec& spec, const WaveFunction& f);

/// Named model catalog. MultiD presets (free, harmonic, quartic, anharmonic)
/// accept any dimension; sturm-liouville and momentum-poly require d = 1.
/// Potentials and coefficients are closed forms in box-centered coordinates.
HamiltonianSpec make_preset(std::string_view name, const GridPtr& grid,
                            const RegulatorFn& w = RegulatorFn::arctan(),
                            double a = 1.0);
std::vector<std::string> preset_names();

}  // namespace chernoff
