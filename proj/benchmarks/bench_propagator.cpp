#include <benchmark/benchmark.h>

#include <chernoff/propagator.hpp>
#include <chernoff/reference.hpp>

using namespace chernoff;

namespace {

WaveFunction packet(const GridPtr& grid) {
  const Grid& g = *grid;
  return sample(grid, [&g](std::span<const double> x) {
    double q = 0.0;
    for (std::size_t m = 0; m < x.size(); ++m) {
      const double y = x[m] - 0.5 * g.length(m);
      q += y * y;
    }
    return cxd(std::exp(-0.5 * q), 0.0);
  });
}

void BM_chernoff_step_harmonic(benchmark::State& state) {
  auto g = make_grid({std::size_t(state.range(0))}, {32.0});
  const HamiltonianSpec spec = make_preset("harmonic", g);
  const WaveFunction f = packet(g);
  const PropagatorConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(chernoff_step(0.01, spec, cfg, f));
}

// Whole-horizon cost of the iterate: one exponential with the norm scaled
// by n, so the work grows with the squaring depth rather than linearly.
void BM_propagate_harmonic(benchmark::State& state) {
  auto g = make_grid({256}, {32.0});
  const HamiltonianSpec spec = make_preset("harmonic", g);
  const WaveFunction f = packet(g);
  PropagatorConfig cfg;
  cfg.n = std::size_t(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(propagate(0.5, spec, cfg, f));
}

void BM_propagate_momentum_poly(benchmark::State& state) {
  auto g = make_grid({256}, {32.0});
  const HamiltonianSpec spec = make_preset("momentum-poly", g);
  const WaveFunction f = packet(g);
  PropagatorConfig cfg;
  cfg.n = std::size_t(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(propagate(0.5, spec, cfg, f));
}

void BM_splitstep_harmonic(benchmark::State& state) {
  auto g = make_grid({256}, {32.0});
  const HamiltonianSpec spec = make_preset("harmonic", g);
  const WaveFunction f = packet(g);
  for (auto _ : state)
    benchmark::DoNotOptimize(splitstep_evolve(spec, 0.5, std::size_t(state.range(0)), f));
}

}  // namespace

BENCHMARK(BM_chernoff_step_harmonic)->Arg(256)->Arg(1024);
BENCHMARK(BM_propagate_harmonic)->Arg(16)->Arg(256)->Arg(4096);
BENCHMARK(BM_propagate_momentum_poly)->Arg(16)->Arg(256)->Arg(4096);
BENCHMARK(BM_splitstep_harmonic)->Arg(64)->Arg(1024);

BENCHMARK_MAIN();
