#include <benchmark/benchmark.h>

#include <chernoff/operators.hpp>
#include <chernoff/random.hpp>

using namespace chernoff;

namespace {

GridPtr grid_1d(std::int64_t n) { return make_grid({std::size_t(n)}, {32.0}); }

void BM_spectral_shift_fractional(benchmark::State& state) {
  auto g = grid_1d(state.range(0));
  const WaveFunction f = random_state(g, 0xBE);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_shift(f, 0, 0.1234));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// Integer multiples of the spacing take the circular-roll fast path.
void BM_spectral_shift_whole_cells(benchmark::State& state) {
  auto g = grid_1d(state.range(0));
  const double h = g->spacing(0);
  const WaveFunction f = random_state(g, 0xBE);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_shift(f, 0, 3.0 * h));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_apply_F_sturm_liouville(benchmark::State& state) {
  auto g = grid_1d(state.range(0));
  const HamiltonianSpec spec = make_preset("sturm-liouville", g);
  const WaveFunction f = random_state(g, 0xF0);
  for (auto _ : state) benchmark::DoNotOptimize(apply_F(0.05, spec, f));
}

void BM_apply_F_momentum_poly(benchmark::State& state) {
  auto g = grid_1d(state.range(0));
  const HamiltonianSpec spec = make_preset("momentum-poly", g);
  const WaveFunction f = random_state(g, 0xF1);
  for (auto _ : state) benchmark::DoNotOptimize(apply_F(0.05, spec, f));
}

void BM_apply_Fk_composed_k2(benchmark::State& state) {
  auto g = grid_1d(state.range(0));
  const SampledField a2 = random_smooth_field(g, 0xA2, 3, 1.0, 2.0);
  const WaveFunction f = random_state(g, 0xF2);
  for (auto _ : state) benchmark::DoNotOptimize(apply_Fk_composed(0.05, 2, a2, f));
}

void BM_apply_W_2d(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  auto g = make_grid({n, n}, {16.0, 16.0});
  const HamiltonianSpec spec = make_preset("harmonic", g);
  const WaveFunction f = random_state(g, 0xD2);
  for (auto _ : state) benchmark::DoNotOptimize(apply_W(0.05, spec, f));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

}  // namespace

BENCHMARK(BM_spectral_shift_fractional)->Arg(64)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(BM_spectral_shift_whole_cells)->Arg(64)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(BM_apply_F_sturm_liouville)->Arg(256)->Arg(1024);
BENCHMARK(BM_apply_F_momentum_poly)->Arg(256)->Arg(1024);
BENCHMARK(BM_apply_Fk_composed_k2)->Arg(256)->Arg(1024);
BENCHMARK(BM_apply_W_2d)->Arg(32)->Arg(128);

BENCHMARK_MAIN();
