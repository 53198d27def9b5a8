#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace chernoff {

using cxd = std::complex<double>;

/// Uniform periodic box [0, L_0) x ... x [0, L_{d-1}) with n_m points on axis m.
/// Immutable after construction. Anything sampled on a Grid is stored row-major
/// with axis 0 slowest.
class Grid {
public:
  /// Throws std::invalid_argument on empty dims, zero points, or non-positive lengths.
  Grid(std::vector<std::size_t> n_points, std::vector<double> lengths);

  std::size_t dim() const noexcept { return n_.size(); }
  /// Total number of points (product over axes).
  std::size_t size() const noexcept { return total_; }
  std::size_t n(std::size_t axis) const { return n_.at(axis); }
  double length(std::size_t axis) const { return length_.at(axis); }
  double spacing(std::size_t axis) const { return spacing_.at(axis); }
  /// Volume of one cell, prod_m h_m.
  double cell_volume() const noexcept { return cell_volume_; }

  /// Signed wavenumbers per axis: entry j holds 2*pi*s(j)/L with
  /// s(j) = j for j <= n/2 and j - n otherwise. For even n the Nyquist
  /// mode is kept with positive sign, +pi*n/L.
  std::span<const double> wavenumbers(std::size_t axis) const { return wavenumbers_.at(axis); }

  /// Coordinate of point i on an axis, x_i = i*h.
  double coord(std::size_t axis, std::size_t i) const { return spacing_.at(axis) * double(i); }
  /// Box-centered coordinate, x_i - L/2.
  double centered_coord(std::size_t axis, std::size_t i) const {
    return coord(axis, i) - 0.5 * length_.at(axis);
  }

  /// Row-major stride of an axis (axis 0 slowest, last axis stride 1).
  std::size_t stride(std::size_t axis) const { return stride_.at(axis); }

  /// Decode a flat index into per-axis indices (size dim()).
  void decode(std::size_t flat, std::span<std::size_t> out) const;

  /// Structural equality: same dims, points and lengths.
  bool operator==(const Grid& other) const noexcept;

private:
  std::vector<std::size_t> n_;
  std::vector<double> length_;
  std::vector<double> spacing_;
  std::vector<std::size_t> stride_;
  std::vector<std::vector<double>> wavenumbers_;
  std::size_t total_ = 0;
  double cell_volume_ = 1.0;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(std::vector<std::size_t> n_points, std::vector<double> lengths);

/// True when both handles describe the same discretization (pointer or structural).
bool same_grid(const GridPtr& a, const GridPtr& b);

namespace detail {
struct WfAccess;
}

/// Complex field sampled on a Grid. Value-semantic and immutable through the
/// public API; operations on wavefunctions are pure functions.
class WaveFunction {
public:
  WaveFunction(GridPtr grid, std::vector<cxd> values);

  const GridPtr& grid() const noexcept { return grid_; }
  std::span<const cxd> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  const cxd& operator[](std::size_t i) const { return values_[i]; }

private:
  friend struct detail::WfAccess;
  GridPtr grid_;
  std::vector<cxd> values_;
};

/// Real scalar field on a Grid (coefficients, potentials). Extremes are
/// recorded at construction.
struct SampledField {
  GridPtr grid;
  std::vector<double> values;
  double min_value = 0.0;
  double max_value = 0.0;

  SampledField(GridPtr g, std::vector<double> v);
  double max_abs() const;
  bool is_constant() const { return min_value == max_value; }
};

/// Sample a complex-valued function fn(x), x the per-axis coordinates of each
/// point (x_i = i*h). Throws std::invalid_argument naming the offending
/// coordinate if fn returns a non-finite value.
WaveFunction sample(const GridPtr& grid,
                    const std::function<cxd(std::span<const double>)>& fn);

/// Real-field analogue of sample() with the same finiteness rejection.
SampledField sample_real(const GridPtr& grid,
                         const std::function<double(std::span<const double>)>& fn);

/// Discrete L2 pairing (prod_m h_m) * sum_i conj(f_i) g_i.
/// Conjugate-linear in the first argument. Grids must match.
cxd inner_product(const WaveFunction& f, const WaveFunction& g);

/// sqrt(Re inner_product(f, f)).
double norm(const WaveFunction& f);

/// Translation along one axis: result(x) = f(x + offset e_axis), realized by
/// the exact spectral phase exp(i*kappa*offset) per mode (Nyquist phase taken
/// as-is). Offsets that are integer multiples of the spacing reduce to an
/// exact circular index roll; offset 0 returns f unchanged. Exactly unitary
/// up to roundoff for every offset.
WaveFunction spectral_shift(const WaveFunction& f, std::size_t axis, double offset);

/// Binary wavefunction dump.
/// Layout: 16-byte magic "CHERNOFF-WF" padded with 5 NUL bytes, then
/// little-endian u32 d, d x u32 n_points, d x f64 lengths, then
/// size() interleaved f64 (re, im) pairs in row-major order (axis 0 slowest).
void write_wf(const WaveFunction& f, std::ostream& out);
void write_wf(const WaveFunction& f, const std::filesystem::path& path);
WaveFunction read_wf(std::istream& in);
WaveFunction read_wf(const std::filesystem::path& path);

}  // namespace chernoff
