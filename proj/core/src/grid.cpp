#include "chernoff/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"

namespace chernoff {

Grid::Grid(std::vector<std::size_t> n_points, std::vector<double> lengths)
    : n_(std::move(n_points)), length_(std::move(lengths)) {
  if (n_.empty()) throw std::invalid_argument("Grid: dimension must be at least 1");
  if (n_.size() != length_.size())
    throw std::invalid_argument("Grid: n_points and lengths must have equal size");
  total_ = 1;
  for (std::size_t m = 0; m < n_.size(); ++m) {
    if (n_[m] == 0)
      throw std::invalid_argument("Grid: n_points must be positive on every axis");
    if (!(length_[m] > 0.0) || !std::isfinite(length_[m]))
      throw std::invalid_argument("Grid: lengths must be positive and finite");
    total_ *= n_[m];
  }
  spacing_.resize(n_.size());
  stride_.resize(n_.size());
  wavenumbers_.resize(n_.size());
  for (std::size_t m = 0; m < n_.size(); ++m) {
    spacing_[m] = length_[m] / double(n_[m]);
    cell_volume_ *= spacing_[m];
    auto& w = wavenumbers_[m];
    w.resize(n_[m]);
    const double base = 2.0 * std::numbers::pi / length_[m];
    for (std::size_t j = 0; j < n_[m]; ++j) {
      const auto half = n_[m] / 2;
      const double s = (j <= half) ? double(j) : double(j) - double(n_[m]);
      w[j] = base * s;
    }
  }
  stride_[n_.size() - 1] = 1;
  for (std::size_t m = n_.size() - 1; m-- > 0;) stride_[m] = stride_[m + 1] * n_[m + 1];
}

void Grid::decode(std::size_t flat, std::span<std::size_t> out) const {
  for (std::size_t m = 0; m < n_.size(); ++m) out[m] = (flat / stride_[m]) % n_[m];
}

bool Grid::operator==(const Grid& other) const noexcept {
  return n_ == other.n_ && length_ == other.length_;
}

GridPtr make_grid(std::vector<std::size_t> n_points, std::vector<double> lengths) {
  return std::make_shared<const Grid>(std::move(n_points), std::move(lengths));
}

bool same_grid(const GridPtr& a, const GridPtr& b) {
  if (!a || !b) return false;
  return a == b || *a == *b;
}

WaveFunction::WaveFunction(GridPtr grid, std::vector<cxd> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("WaveFunction: null grid");
  if (values_.size() != grid_->size())
    throw std::invalid_argument("WaveFunction: value count does not match grid size");
}

SampledField::SampledField(GridPtr g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw std::invalid_argument("SampledField: null grid");
  if (values.size() != grid->size())
    throw std::invalid_argument("SampledField: value count does not match grid size");
  if (!values.empty()) {
    min_value = max_value = values[0];
    for (double x : values) {
      min_value = std::min(min_value, x);
      max_value = std::max(max_value, x);
    }
  }
}

double SampledField::max_abs() const {
  return std::max(std::abs(min_value), std::abs(max_value));
}

namespace {

[[noreturn]] void throw_nonfinite(std::span<const double> x) {
  std::ostringstream os;
  os << "sample: non-finite value at x = (";
  for (std::size_t m = 0; m < x.size(); ++m) os << (m ? ", " : "") << x[m];
  os << ")";
  throw std::invalid_argument(os.str());
}

template <typename T, typename Fn, typename FiniteCheck>
std::vector<T> sample_impl(const GridPtr& grid, const Fn& fn, const FiniteCheck& ok) {
  const Grid& g = *grid;
  std::vector<T> out(g.size());
  std::vector<std::size_t> idx(g.dim());
  std::vector<double> x(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.decode(i, idx);
    for (std::size_t m = 0; m < g.dim(); ++m) x[m] = g.coord(m, idx[m]);
    out[i] = fn(std::span<const double>(x));
    if (!ok(out[i])) throw_nonfinite(x);
  }
  return out;
}

}  // namespace

WaveFunction sample(const GridPtr& grid,
                    const std::function<cxd(std::span<const double>)>& fn) {
  auto v = sample_impl<cxd>(grid, fn, [](const cxd& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
  return WaveFunction(grid, std::move(v));
}

SampledField sample_real(const GridPtr& grid,
                         const std::function<double(std::span<const double>)>& fn) {
  auto v = sample_impl<double>(grid, fn, [](double z) { return std::isfinite(z); });
  return SampledField(grid, std::move(v));
}

cxd inner_product(const WaveFunction& f, const WaveFunction& g) {
  if (!same_grid(f.grid(), g.grid()))
    throw std::invalid_argument("inner_product: wavefunctions live on different grids");
  cxd acc(0.0, 0.0);
  const auto fv = f.values();
  const auto gv = g.values();
  for (std::size_t i = 0; i < fv.size(); ++i) acc += std::conj(fv[i]) * gv[i];
  return acc * f.grid()->cell_volume();
}

double norm(const WaveFunction& f) {
  double acc = 0.0;
  for (const cxd& z : f.values()) acc += std::norm(z);
  return std::sqrt(acc * f.grid()->cell_volume());
}

WaveFunction spectral_shift(const WaveFunction& f, std::size_t axis, double offset) {
  const Grid& g = *f.grid();
  if (axis >= g.dim()) throw std::invalid_argument("spectral_shift: axis out of range");
  if (!std::isfinite(offset)) throw std::invalid_argument("spectral_shift: non-finite offset");

  std::vector<cxd> out(f.values().begin(), f.values().end());
  const std::size_t n = g.n(axis);
  const double h = g.spacing(axis);

  // Integer multiples of the spacing are an exact circular roll.
  const double ratio = offset / h;
  const double r = std::nearbyint(ratio);
  if (r * h == offset && std::abs(r) < double(1ULL << 62)) {
    long long m = static_cast<long long>(r) % static_cast<long long>(n);
    if (m < 0) m += static_cast<long long>(n);
    if (m != 0) {
      const std::size_t s = g.stride(axis);
      const std::size_t block = n * s;
      const std::vector<cxd> src = out;
      for (std::size_t base = 0; base < src.size(); base += block)
        for (std::size_t inner = 0; inner < s; ++inner)
          for (std::size_t j = 0; j < n; ++j) {
            const std::size_t js = (j + static_cast<std::size_t>(m)) % n;
            out[base + inner + j * s] = src[base + inner + js * s];
          }
    }
    return WaveFunction(f.grid(), std::move(out));
  }

  const auto kappa = g.wavenumbers(axis);
  std::vector<cxd> mult(n);
  const double inv = 1.0 / double(n);
  for (std::size_t j = 0; j < n; ++j)
    mult[j] = std::polar(inv, kappa[j] * offset);
  detail::spectral_filter_axis(g, axis, mult.data(), out.data());
  return WaveFunction(f.grid(), std::move(out));
}

}  // namespace chernoff
