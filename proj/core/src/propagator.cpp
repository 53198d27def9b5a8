#include "chernoff/propagator.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include "chernoff/random.hpp"
#include "fft.hpp"

namespace chernoff {
namespace {

double wf_norm(const std::vector<cxd>& v, double cell) {
  double acc = 0.0;
  for (const cxd& z : v) acc += std::norm(z);
  return std::sqrt(acc * cell);
}

// --- step-operator norm cache -------------------------------------------
// propagate/chernoff_step reuse power-iteration estimates keyed by the spec
// content and the step size. Read-mostly, shared across threads.

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t hash_doubles(const std::vector<double>& v, std::uint64_t h) {
  return fnv1a(v.data(), v.size() * sizeof(double), h);
}

std::uint64_t fingerprint(const HamiltonianSpec& spec) {
  std::uint64_t h = 1469598103934665603ULL;
  const Grid& g = *spec.grid();
  for (std::size_t m = 0; m < g.dim(); ++m) {
    const std::size_t n = g.n(m);
    const double L = g.length(m);
    h = fnv1a(&n, sizeof(n), h);
    h = fnv1a(&L, sizeof(L), h);
  }
  const RegulatorFn& w = spec.regulator();
  const int kind = static_cast<int>(w.kind());
  const double bound = w.bound();
  h = fnv1a(&kind, sizeof(kind), h);
  h = fnv1a(&bound, sizeof(bound), h);
  h = fnv1a(w.name().data(), w.name().size(), h);
  if (w.kind() == RegulatorKind::custom)
    for (double z : {0.37, -1.91, 42.0}) {
      const double p = w(z);
      h = fnv1a(&p, sizeof(p), h);
    }
  if (spec.is_oned()) {
    const auto& c = spec.oned().coeffs;
    h = fnv1a("1d", 2, h);
    h = hash_doubles(c.a0().values, h);
    for (std::size_t k = 1; k <= c.order(); ++k) h = hash_doubles(c.a(k).values, h);
  } else {
    const auto& m = spec.multid();
    h = fnv1a("md", 2, h);
    h = fnv1a(&m.a, sizeof(m.a), h);
    h = hash_doubles(m.potential.field.values, h);
  }
  return h;
}

struct StepKey {
  std::uint64_t fp;
  std::uint64_t step_bits;
  bool operator==(const StepKey&) const = default;
};

struct StepKeyHash {
  std::size_t operator()(const StepKey& k) const noexcept {
    return std::size_t(k.fp ^ (k.step_bits * 0x9e3779b97f4a7c15ULL));
  }
};

double cached_step_norm(const HamiltonianSpec& spec, double step, const LinearMap& op) {
  static std::shared_mutex mutex;
  static std::unordered_map<StepKey, double, StepKeyHash> cache;

  std::uint64_t bits;
  std::memcpy(&bits, &step, sizeof(bits));
  const StepKey key{fingerprint(spec), bits};
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double est = estimate_operator_norm(op, spec.grid());
  {
    std::unique_lock lock(mutex);
    cache.emplace(key, est);
  }
  return est;
}

// One Taylor evaluation of exp(c X) applied to cur (no squaring).
// Returns the updated vector; fills trace_out if requested.
std::vector<cxd> taylor_factor(const LinearMap& op, cxd c, const GridPtr& grid,
                               std::vector<cxd> cur, const PropagatorConfig& cfg,
                               SeriesTrace* trace_out) {
  const double cell = grid->cell_volume();
  const double ref = wf_norm(cur, cell);
  SeriesTrace trace;
  trace.partial_norms.push_back(ref);
  if (ref == 0.0) {
    trace.converged = true;
    if (trace_out) *trace_out = std::move(trace);
    return cur;
  }

  std::vector<cxd> acc = cur;
  WaveFunction term(grid, std::move(cur));
  for (std::size_t q = 1; q <= cfg.max_terms; ++q) {
    WaveFunction applied = op(term);
    auto& tv = detail::WfAccess::raw(applied);
    const cxd scale = c / double(q);
    for (auto& z : tv) z *= scale;
    for (std::size_t p = 0; p < acc.size(); ++p) acc[p] += tv[p];
    const double tn = wf_norm(tv, cell);
    trace.partial_norms.push_back(tn);
    trace.terms_used = q;
    term = std::move(applied);
    if (tn <= cfg.taylor_tol * ref) {
      trace.converged = true;
      if (trace_out) *trace_out = std::move(trace);
      return acc;
    }
  }
  std::ostringstream os;
  os << "exp_apply: Taylor series did not converge within " << cfg.max_terms
     << " terms (last term norm " << trace.partial_norms.back() << ", target "
     << cfg.taylor_tol * ref << ")";
  throw series_divergence_error(os.str(), std::move(trace));
}

struct StepOperator {
  LinearMap op;
  cxd coefficient;  // factor multiplying the step operator in the exponent
};

StepOperator step_operator(double step, const HamiltonianSpec& spec) {
  if (spec.is_oned())
    return {[&spec, step](const WaveFunction& g) { return apply_F(step, spec, g); },
            cxd(0.0, -1.0)};
  return {[&spec, step](const WaveFunction& g) { return apply_W(step, spec, g); },
          cxd(0.0, spec.multid().a)};
}

}  // namespace

double estimate_operator_norm(const LinearMap& op, const GridPtr& grid,
                              std::size_t iterations, std::uint64_t seed) {
  WaveFunction g = random_state(grid, seed);
  double est = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    const double gn = norm(g);
    if (gn == 0.0) return 0.0;
    auto& gv = detail::WfAccess::raw(g);
    for (auto& z : gv) z /= gn;
    g = op(g);
    est = norm(g);
    if (est == 0.0) return 0.0;
  }
  return est;
}

WaveFunction exp_apply(const LinearMap& op, cxd c, const WaveFunction& f,
                       const PropagatorConfig& cfg, double op_norm_estimate,
                       SeriesTrace* trace) {
  if (!(cfg.taylor_tol > 0.0) || cfg.max_terms == 0 || !(cfg.squaring_threshold > 0.0))
    throw std::invalid_argument("exp_apply: invalid propagator configuration");

  const double est = op_norm_estimate >= 0.0
                         ? op_norm_estimate
                         : estimate_operator_norm(op, f.grid());
  const double z = std::abs(c) * est;

  std::size_t s = 0;
  if (z > cfg.squaring_threshold)
    s = static_cast<std::size_t>(std::ceil(std::log2(z / cfg.squaring_threshold)));
  constexpr std::size_t max_squaring_depth = 26;
  if (s > max_squaring_depth) {
    std::ostringstream os;
    os << "exp_apply: exponent norm " << z << " needs squaring depth " << s
       << " (limit " << max_squaring_depth << ")";
    throw series_divergence_error(os.str(), {});
  }
  const std::size_t factors = std::size_t(1) << s;
  const cxd cs = c / double(factors);

  std::vector<cxd> cur(f.values().begin(), f.values().end());
  SeriesTrace worst;
  for (std::size_t fct = 0; fct < factors; ++fct) {
    SeriesTrace local;
    cur = taylor_factor(op, cs, f.grid(), std::move(cur), cfg,
                        trace ? &local : nullptr);
    if (trace && local.terms_used >= worst.terms_used) worst = std::move(local);
  }
  if (trace) {
    worst.converged = true;
    *trace = std::move(worst);
  }
  return WaveFunction(f.grid(), std::move(cur));
}

WaveFunction chernoff_step(double t, const HamiltonianSpec& spec,
                           const PropagatorConfig& cfg, const WaveFunction& f) {
  if (!std::isfinite(t) || t < 0.0)
    throw std::invalid_argument("chernoff_step: t must be finite and >= 0");
  if (!same_grid(spec.grid(), f.grid()))
    throw std::invalid_argument("chernoff_step: spec and state grids differ");
  auto so = step_operator(t, spec);
  const double est = cached_step_norm(spec, t, so.op);
  return exp_apply(so.op, so.coefficient, f, cfg, est);
}

WaveFunction propagate(double t, const HamiltonianSpec& spec,
                       const PropagatorConfig& cfg, const WaveFunction& psi0) {
  if (!std::isfinite(t) || t < 0.0)
    throw std::invalid_argument("propagate: t must be finite and >= 0");
  if (cfg.n == 0) throw std::invalid_argument("propagate: n must be >= 1");
  if (!same_grid(spec.grid(), psi0.grid()))
    throw std::invalid_argument("propagate: spec and state grids differ");
  const double step = t / double(cfg.n);
  auto so = step_operator(step, spec);
  const double est = cached_step_norm(spec, step, so.op);
  return exp_apply(so.op, so.coefficient * double(cfg.n), psi0, cfg, est);
}

std::pair<WaveFunction, SeriesTrace> series_partial(double t, std::size_t j,
                                                    const HamiltonianSpec& spec,
                                                    const PropagatorConfig& cfg,
                                                    const WaveFunction& psi0) {
  if (!std::isfinite(t) || t < 0.0)
    throw std::invalid_argument("series_partial: t must be finite and >= 0");
  if (cfg.n == 0) throw std::invalid_argument("series_partial: n must be >= 1");
  if (!same_grid(spec.grid(), psi0.grid()))
    throw std::invalid_argument("series_partial: spec and state grids differ");

  const double step = t / double(cfg.n);
  auto so = step_operator(step, spec);
  const cxd c = so.coefficient * double(cfg.n);
  const double cell = psi0.grid()->cell_volume();

  std::vector<cxd> acc(psi0.values().begin(), psi0.values().end());
  SeriesTrace trace;
  const double ref = wf_norm(acc, cell);
  trace.partial_norms.push_back(ref);
  if (ref == 0.0 || j == 0) {
    trace.converged = true;
    return {WaveFunction(psi0.grid(), std::move(acc)), trace};
  }

  WaveFunction term = psi0;
  for (std::size_t q = 1; q <= j; ++q) {
    WaveFunction applied = so.op(term);
    auto& tv = detail::WfAccess::raw(applied);
    const cxd scale = c / double(q);
    for (auto& z : tv) z *= scale;
    for (std::size_t p = 0; p < acc.size(); ++p) acc[p] += tv[p];
    const double tn = wf_norm(tv, cell);
    trace.partial_norms.push_back(tn);
    trace.terms_used = q;
    term = std::move(applied);
    if (tn <= cfg.taylor_tol * ref) {
      trace.converged = true;
      break;
    }
  }
  return {WaveFunction(psi0.grid(), std::move(acc)), trace};
}

}  // namespace chernoff
