#pragma once

#include <span>

#include "chernoff/operators.hpp"

namespace chernoff {

enum class OracleMethod { splitstep, analytic, dense };

struct OracleResult {
  WaveFunction wavefunction;
  OracleMethod method;
  std::size_t steps = 0;     // 0 for one-shot methods
  double est_error = 0.0;    // self-estimated accuracy, >= 0
};

/// Dense reference is limited to small grids.
inline constexpr std::size_t dense_oracle_max_points = 512;

/// Strang split-step reference for MultiD specs: half-step potential phase
/// exp(-i a dt V / 2), full kinetic step exp(-i a dt ||kappa||^2 / 2) in
/// Fourier space, half-step phase. est_error is the L2 distance to a run
/// with 2x steps.
OracleResult splitstep_evolve(const HamiltonianSpec& spec, double t,
                              std::size_t steps, const WaveFunction& psi0);

/// Free-particle Gaussian wavepacket under psi_t = i a (1/2) Laplacian psi:
/// per axis, width sigma(t)^2 = sigma0^2 + i a t, center x0 + a t k0,
/// momentum k0. x0 and k0 are box-centered coordinates. Rejects states whose
/// boundary-cell mass at time t is not below 1e-12 (reported in the message).
WaveFunction analytic_free_gaussian(double sigma0, std::span<const double> x0,
                                    std::span<const double> k0, double t,
                                    const GridPtr& grid, double a = 1.0);

/// Harmonic eigenstate reference for the "harmonic" preset (V = ||x-c||^2/2,
/// a = 1): the product Hermite function of the given level per axis times
/// the phase exp(-i d (level + 1/2) t). Levels above 10 are rejected as
/// unresolved; the boundary-mass precondition applies as for the Gaussian.
WaveFunction analytic_harmonic_state(std::size_t level, double t, const GridPtr& grid);

/// Dense ground truth on grids up to dense_oracle_max_points points: the
/// generator (-i H for OneD, i a H for MultiD) is materialized column by
/// column through apply_H and exponentiated by dense scaling-and-squaring.
OracleResult dense_oracle(const HamiltonianSpec& spec, double t,
                          const WaveFunction& psi0);

}  // namespace chernoff
