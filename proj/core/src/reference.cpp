#include "chernoff/reference.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fft.hpp"

namespace chernoff {
namespace {

double l2_distance(const WaveFunction& f, const WaveFunction& g) {
  double acc = 0.0;
  const auto fv = f.values();
  const auto gv = g.values();
  for (std::size_t i = 0; i < fv.size(); ++i) acc += std::norm(fv[i] - gv[i]);
  return std::sqrt(acc * f.grid()->cell_volume());
}

// Mass in the outermost cell layer (any axis index 0 or n-1).
double boundary_mass(const WaveFunction& f) {
  const Grid& g = *f.grid();
  std::vector<std::size_t> idx(g.dim());
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.decode(i, idx);
    bool boundary = false;
    for (std::size_t m = 0; m < g.dim(); ++m)
      if (idx[m] == 0 || idx[m] + 1 == g.n(m)) boundary = true;
    if (boundary) acc += std::norm(f[i]);
  }
  return acc * g.cell_volume();
}

void check_boundary_mass(const WaveFunction& f, const char* what) {
  const double mass = boundary_mass(f);
  if (!(mass < 1e-12)) {
    std::ostringstream os;
    os << what << ": state is not contained in the box (boundary-cell mass = "
       << mass << ", required < 1e-12)";
    throw std::invalid_argument(os.str());
  }
}

WaveFunction splitstep_run(const MultiDSpec& spec, const GridPtr& grid, double t,
                           std::size_t steps, const WaveFunction& psi0) {
  const Grid& g = *grid;
  const double dt = t / double(steps);
  const double a = spec.a;

  std::vector<cxd> half_phase(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    half_phase[i] = std::polar(1.0, -0.5 * a * dt * spec.potential.field.values[i]);

  // Kinetic factor exp(-i a dt ||kappa||^2 / 2) with the inverse-transform
  // normalization folded in.
  std::vector<cxd> kinetic(g.size());
  std::vector<std::size_t> idx(g.dim());
  const double inv_total = 1.0 / double(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.decode(i, idx);
    double k2 = 0.0;
    for (std::size_t m = 0; m < g.dim(); ++m) {
      const double km = g.wavenumbers(m)[idx[m]];
      k2 += km * km;
    }
    kinetic[i] = std::polar(inv_total, -0.5 * a * dt * k2);
  }

  std::vector<cxd> v(psi0.values().begin(), psi0.values().end());
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= half_phase[i];
    detail::dft_all(g, -1, v.data());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= kinetic[i];
    detail::dft_all(g, +1, v.data());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= half_phase[i];
  }
  return WaveFunction(grid, std::move(v));
}

}  // namespace

OracleResult splitstep_evolve(const HamiltonianSpec& spec, double t,
                              std::size_t steps, const WaveFunction& psi0) {
  if (spec.is_oned())
    throw std::invalid_argument(
        "splitstep_evolve: MultiD specs only (no classical splitting is "
        "shipped for order-2K operators; use dense_oracle)");
  if (steps == 0) throw std::invalid_argument("splitstep_evolve: steps must be >= 1");
  if (!std::isfinite(t) || t < 0.0)
    throw std::invalid_argument("splitstep_evolve: t must be finite and >= 0");
  if (!same_grid(spec.grid(), psi0.grid()))
    throw std::invalid_argument("splitstep_evolve: spec and state grids differ");

  WaveFunction coarse = splitstep_run(spec.multid(), psi0.grid(), t, steps, psi0);
  WaveFunction fine = splitstep_run(spec.multid(), psi0.grid(), t, 2 * steps, psi0);
  const double est = l2_distance(coarse, fine);
  return OracleResult{std::move(coarse), OracleMethod::splitstep, steps, est};
}

WaveFunction analytic_free_gaussian(double sigma0, std::span<const double> x0,
                                    std::span<const double> k0, double t,
                                    const GridPtr& grid, double a) {
  const Grid& g = *grid;
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0))
    throw std::invalid_argument("analytic_free_gaussian: sigma0 must be positive");
  if (x0.size() != g.dim() || k0.size() != g.dim())
    throw std::invalid_argument("analytic_free_gaussian: x0/k0 dimension mismatch");
  if (!std::isfinite(t) || t < 0.0)
    throw std::invalid_argument("analytic_free_gaussian: t must be finite and >= 0");

  const cxd alpha(sigma0 * sigma0, a * t);  // complex width sigma(t)^2
  const double c0 = std::pow(std::numbers::pi * sigma0 * sigma0, -0.25);
  const cxd pref = c0 * std::sqrt(cxd(sigma0 * sigma0, 0.0) / alpha);

  std::vector<cxd> v(g.size());
  std::vector<std::size_t> idx(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.decode(i, idx);
    cxd val(1.0, 0.0);
    for (std::size_t m = 0; m < g.dim(); ++m) {
      const double y = g.centered_coord(m, idx[m]) - x0[m];  // relative to launch center
      const double drift = a * t * k0[m];
      const cxd expo = -(y - drift) * (y - drift) / (2.0 * alpha) +
                       cxd(0.0, k0[m] * y - 0.5 * a * t * k0[m] * k0[m]);
      val *= pref * std::exp(expo);
    }
    v[i] = val;
  }
  WaveFunction out(grid, std::move(v));
  check_boundary_mass(out, "analytic_free_gaussian");
  return out;
}

WaveFunction analytic_harmonic_state(std::size_t level, double t, const GridPtr& grid) {
  const Grid& g = *grid;
  if (level > 10)
    throw std::invalid_argument(
        "analytic_harmonic_state: level > 10 is not resolved on supported grids");
  if (!std::isfinite(t) || t < 0.0)
    throw std::invalid_argument("analytic_harmonic_state: t must be finite and >= 0");

  // Normalized Hermite functions by stable recurrence:
  // h_0 = pi^(-1/4) exp(-xi^2/2), h_n = xi sqrt(2/n) h_{n-1} - sqrt((n-1)/n) h_{n-2}.
  auto hermite = [level](double xi) {
    double h0 = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * xi * xi);
    if (level == 0) return h0;
    double h1 = std::sqrt(2.0) * xi * h0;
    if (level == 1) return h1;
    double hk = h1;
    for (std::size_t n = 2; n <= level; ++n) {
      const double next =
          xi * std::sqrt(2.0 / double(n)) * hk - std::sqrt(double(n - 1) / double(n)) * h0;
      h0 = hk;
      hk = next;
    }
    return hk;
  };

  const double energy = double(g.dim()) * (double(level) + 0.5);
  const cxd phase = std::polar(1.0, -energy * t);
  std::vector<cxd> v(g.size());
  std::vector<std::size_t> idx(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.decode(i, idx);
    double val = 1.0;
    for (std::size_t m = 0; m < g.dim(); ++m) val *= hermite(g.centered_coord(m, idx[m]));
    v[i] = phase * val;
  }
  WaveFunction out(grid, std::move(v));
  check_boundary_mass(out, "analytic_harmonic_state");
  return out;
}

OracleResult dense_oracle(const HamiltonianSpec& spec, double t,
                          const WaveFunction& psi0) {
  const GridPtr& grid = psi0.grid();
  if (!same_grid(spec.grid(), grid))
    throw std::invalid_argument("dense_oracle: spec and state grids differ");
  const std::size_t T = grid->size();
  if (T > dense_oracle_max_points) {
    std::ostringstream os;
    os << "dense_oracle: grid has " << T << " points; the dense reference is "
       << "capped at " << dense_oracle_max_points;
    throw std::invalid_argument(os.str());
  }
  if (!std::isfinite(t) || t < 0.0)
    throw std::invalid_argument("dense_oracle: t must be finite and >= 0");

  const cxd gen_c = spec.is_oned() ? cxd(0.0, -1.0) : cxd(0.0, spec.multid().a);
  Eigen::MatrixXcd G(T, T);
  std::vector<cxd> e(T, cxd(0.0, 0.0));
  for (std::size_t col = 0; col < T; ++col) {
    e[col] = cxd(1.0, 0.0);
    WaveFunction basis(grid, e);
    WaveFunction hcol = apply_H(spec, basis);
    for (std::size_t row = 0; row < T; ++row) G(row, col) = gen_c * t * hcol[row];
    e[col] = cxd(0.0, 0.0);
  }
  Eigen::MatrixXcd E = G.exp();
  Eigen::VectorXcd v0(T);
  for (std::size_t i = 0; i < T; ++i) v0(i) = psi0[i];
  Eigen::VectorXcd out = E * v0;
  std::vector<cxd> v(T);
  for (std::size_t i = 0; i < T; ++i) v[i] = out(i);
  return OracleResult{WaveFunction(grid, std::move(v)), OracleMethod::dense, 0, 0.0};
}

}  // namespace chernoff
