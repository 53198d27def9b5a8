#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chernoff/operators.hpp"
#include "chernoff/propagator.hpp"

namespace chernoff {

// Outcome of one executable property check.  `worst_violation` is normalized
// so that pass <=> worst_violation <= the property's declared tolerance (the
// `tol` argument where one exists, 0 for slope/ratio style checks).  `details`
// always records the seed used, so a report can be reproduced bit-for-bit.
struct PropertyReport {
  std::string property_id;
  std::size_t samples = 0;
  double worst_violation = 0.0;
  std::optional<double> fitted_order;
  bool pass = false;
  std::vector<std::pair<std::string, double>> details;
};

// A one-parameter operator family t -> op(t).
using OpFamily = std::function<LinearMap(double)>;

// The generator family of `spec`: t -> F(t) (one-dimensional) or t -> W(t)
// (multi-dimensional), with optional fault injection for mutation controls.
OpFamily step_family(const HamiltonianSpec& spec, FaultInjection fault = {});

// Symmetry defect max |<op(t)f,g> - <f,op(t)g>| / (|f||g|) over random
// (f,g) pairs and all t in t_list; pass iff <= tol.
PropertyReport verify_self_adjoint(const OpFamily& family, const GridPtr& grid,
                                   std::span<const double> t_list,
                                   std::size_t trials, double tol,
                                   std::uint64_t seed);

// First-order tangency of the step family to the generator: measures
// e(t) = |(I + F(t))phi - phi - t*H(phi)| (W in the multi-dimensional case)
// over a geometric t grid and fits the log-log slope.  Pass iff the slope is
// at least slope_threshold.  Points with e(t) below 1e-13*|phi| sit in
// rounding noise; they are excluded from the fit and counted in the details.
PropertyReport verify_tangency(const HamiltonianSpec& spec,
                               const WaveFunction& phi,
                               std::span<const double> t_grid,
                               double slope_threshold = 1.2,
                               FaultInjection fault = {});

// Operator-norm certificates via power iteration (at most 500 steps per t):
//  - multi-dimensional: |W(t)| <= (2 + M) * (1 + 1e-6),
//  - one-dimensional:   |F(t)| <= M + sum_k 4^k * max|a_k|  (same slack),
//  - the shift A(tau) is an isometry to 1e-12 on random states.
// A power iteration that has not stabilized after 500 steps marks the report
// inconclusive: pass=false with details["power_iteration_converged"]=0.
PropertyReport verify_norm_bounds(const HamiltonianSpec& spec,
                                  std::span<const double> t_list,
                                  std::uint64_t seed);

// Strong continuity of the step family at t=0, checked on sampled states
// only: r(t) = max over samples of |F(t)f| / |f| must decay with slope
// >= 0.9 in log t and drop by at least 10x across the grid.  This is a
// sampled stand-in for the for-all-f statement; details flag it as such.
PropertyReport verify_strong_continuity(const HamiltonianSpec& spec,
                                        std::span<const double> t_grid,
                                        std::size_t trials, std::uint64_t seed);

// Geometric t grid adapted to the model for the continuity check: the top
// entry is 0.3x the largest t at which every operator piece is still in its
// linear regime (w arguments below 1, every shift offset below 1/kappa_max),
// the bottom entry 1000x smaller.  Outside that window the residual slope
// reflects symbol saturation rather than the t -> 0 limit.
std::vector<double> continuity_window(const HamiltonianSpec& spec,
                                      std::size_t points = 6);

// Convergence of the Chernoff iterate to a reference solution: errors
// eps(n) = |propagate(t, n) - oracle| must be non-increasing within 10%
// slack and satisfy eps(n_max) < eps(n_min)/4.  Reports the fitted empirical
// order (negated log-log slope of eps vs n).
PropertyReport verify_convergence(const HamiltonianSpec& spec,
                                  const WaveFunction& psi0, double t,
                                  std::span<const std::size_t> n_list,
                                  const WaveFunction& oracle,
                                  const PropagatorConfig& base_cfg = {});

}  // namespace chernoff
