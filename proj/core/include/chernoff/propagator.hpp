#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "chernoff/operators.hpp"

namespace chernoff {

struct PropagatorConfig {
  std::size_t n = 1;                 // Chernoff subdivisions of [0, t]
  double taylor_tol = 1e-14;         // relative running-term stop threshold
  std::size_t max_terms = 400;       // Taylor term cap per factor
  double squaring_threshold = 1.0;   // exponent norm above which scaling-and-squaring kicks in
};

/// Diagnostics of one truncated exponential series evaluation.
struct SeriesTrace {
  std::vector<double> partial_norms;  // ||c^q/q! X^q f|| per term, q = 0, 1, ...
  std::size_t terms_used = 0;
  bool converged = false;
};

using LinearMap = std::function<WaveFunction(const WaveFunction&)>;

/// Thrown when a Taylor factor fails to converge within max_terms (or the
/// required squaring depth is infeasible). Carries the failing trace.
class series_divergence_error : public std::runtime_error {
public:
  series_divergence_error(const std::string& msg, SeriesTrace t)
      : std::runtime_error(msg), trace(std::move(t)) {}
  SeriesTrace trace;
};

/// Operator norm lower estimate by fixed-seed power iteration.
double estimate_operator_norm(const LinearMap& op, const GridPtr& grid,
                              std::size_t iterations = 20,
                              std::uint64_t seed = 0x5eedULL);

/// exp(c X) f by Taylor summation with term-norm stopping. If the available
/// estimate of ||c X|| exceeds cfg.squaring_threshold the exponent is halved
/// s times and the factor applied 2^s times. Pass op_norm_estimate = ||X||
/// when known; a negative value triggers an internal power-iteration
/// estimate. Throws series_divergence_error on non-convergence.
WaveFunction exp_apply(const LinearMap& op, cxd c, const WaveFunction& f,
                       const PropagatorConfig& cfg, double op_norm_estimate = -1.0,
                       SeriesTrace* trace = nullptr);

/// One Chernoff step at step size t: exp(-i F(t)) f for OneD specs,
/// exp(i a W(t)) f for MultiD specs.
WaveFunction chernoff_step(double t, const HamiltonianSpec& spec,
                           const PropagatorConfig& cfg, const WaveFunction& f);

/// Chernoff iterate at time t with cfg.n subdivisions, evaluated as the
/// single exponential exp(-i n F(t/n)) f (OneD) or exp(i a n W(t/n)) f
/// (MultiD); equal to the n-fold product of steps since each family
/// commutes with itself at fixed step size.
WaveFunction propagate(double t, const HamiltonianSpec& spec,
                       const PropagatorConfig& cfg, const WaveFunction& psi0);

/// Truncated double-limit series sum_{q=0..j} (c^q/q!) X^q psi0 with the
/// propagate() exponent (c, X as above), no scaling-and-squaring, hard cap j.
std::pair<WaveFunction, SeriesTrace> series_partial(double t, std::size_t j,
                                                    const HamiltonianSpec& spec,
                                                    const PropagatorConfig& cfg,
                                                    const WaveFunction& psi0);

}  // namespace chernoff
