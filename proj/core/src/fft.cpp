#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

namespace chernoff::detail {
namespace {

// FFTW planning is not thread-safe; plan execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct CachedPlan {
  fftw_plan plan = nullptr;
  fftw_complex* buf = nullptr;
  std::size_t n = 0;

  CachedPlan(std::size_t length, int sign) : n(length) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    buf = fftw_alloc_complex(length);
    plan = fftw_plan_dft_1d(static_cast<int>(length), buf, buf,
                            sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }
  CachedPlan(const CachedPlan&) = delete;
  CachedPlan& operator=(const CachedPlan&) = delete;
  ~CachedPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    if (buf) fftw_free(buf);
  }
};

// One plan+buffer per (length, sign) per thread; gather/scatter keeps a
// single code path for any axis stride.
CachedPlan& plan_for(std::size_t n, int sign) {
  thread_local std::map<std::pair<std::size_t, int>, std::unique_ptr<CachedPlan>> cache;
  auto& slot = cache[{n, sign}];
  if (!slot) slot = std::make_unique<CachedPlan>(n, sign);
  return *slot;
}

inline cxd* as_cxd(fftw_complex* p) { return reinterpret_cast<cxd*>(p); }

// Visit every line along `axis`, calling line(buf) with the gathered points.
template <typename LineFn>
void for_each_line(const Grid& g, std::size_t axis, cxd* data, cxd* buf, LineFn&& line) {
  const std::size_t n = g.n(axis);
  const std::size_t s = g.stride(axis);
  const std::size_t block = n * s;  // contiguous span covered by one axis sweep
  const std::size_t total = g.size();
  for (std::size_t base = 0; base < total; base += block) {
    for (std::size_t inner = 0; inner < s; ++inner) {
      cxd* p = data + base + inner;
      for (std::size_t j = 0; j < n; ++j) buf[j] = p[j * s];
      line(buf);
      for (std::size_t j = 0; j < n; ++j) p[j * s] = buf[j];
    }
  }
}

}  // namespace

void dft_axis(const Grid& g, std::size_t axis, int sign, cxd* data) {
  auto& cp = plan_for(g.n(axis), sign);
  for_each_line(g, axis, data, as_cxd(cp.buf),
                [&](cxd*) { fftw_execute(cp.plan); });
}

void spectral_filter_axis(const Grid& g, std::size_t axis,
                          const cxd* multiplier, cxd* data) {
  const std::size_t n = g.n(axis);
  auto& fwd = plan_for(n, -1);
  auto& bwd = plan_for(n, +1);
  // Both plans execute in-place on fwd's buffer via the new-array interface.
  for_each_line(g, axis, data, as_cxd(fwd.buf), [&](cxd* buf) {
    fftw_execute(fwd.plan);
    for (std::size_t j = 0; j < n; ++j) buf[j] *= multiplier[j];
    fftw_execute_dft(bwd.plan, reinterpret_cast<fftw_complex*>(buf),
                     reinterpret_cast<fftw_complex*>(buf));
  });
}

void dft_all(const Grid& g, int sign, cxd* data) {
  for (std::size_t axis = 0; axis < g.dim(); ++axis) dft_axis(g, axis, sign, data);
}

}  // namespace chernoff::detail
