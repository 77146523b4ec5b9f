#include <benchmark/benchmark.h>

#include <cmath>

#include "karlin/genweights.hpp"
#include "karlin/limit.hpp"
#include "karlin/moments.hpp"
#include "karlin/rng.hpp"
#include "karlin/simulate.hpp"

namespace {

const karlin::WeightModel& weibull_half() {
  static auto m = karlin::WeightModel::weibull(0.5);
  return m;
}

void BM_enumerate_gen2(benchmark::State& state) {
  double eps = std::exp(-(double)state.range(0));
  for (auto _ : state) {
    auto gw = karlin::enumerate_generation(weibull_half(), 2, eps);
    benchmark::DoNotOptimize(gw.kept_mass);
  }
}
BENCHMARK(BM_enumerate_gen2)->Arg(20)->Arg(40)->Arg(60);

void BM_phi_gen2(benchmark::State& state) {
  auto gw = karlin::enumerate_generation(weibull_half(), 2,
                                         std::exp(-(double)state.range(0)));
  double t = std::exp(12.0);
  for (auto _ : state) benchmark::DoNotOptimize(karlin::phi(gw, t));
  state.SetItemsProcessed(state.iterations() * gw.count());
}
BENCHMARK(BM_phi_gen2)->Arg(30)->Arg(60);

void BM_hitting_replica(benchmark::State& state) {
  auto forest = karlin::build_forest(weibull_half(), 2,
                                     std::exp(-(double)state.range(0)));
  std::uint64_t r = 0;
  for (auto _ : state) {
    karlin::RngStream rng(1, r++);
    auto times = karlin::simulate_hitting_times(forest, rng);
    benchmark::DoNotOptimize(times.times[1].data());
  }
}
BENCHMARK(BM_hitting_replica)->Arg(20)->Arg(40);

void BM_ball_throwing(benchmark::State& state) {
  std::int64_t n = state.range(0);
  std::uint64_t r = 0;
  for (auto _ : state) {
    karlin::RngStream rng(2, r++);
    auto counts = karlin::simulate_balls(weibull_half(), {n}, 2, rng);
    benchmark::DoNotOptimize(counts[1][0]);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ball_throwing)->Arg(1000)->Arg(22026);

void BM_cholesky_sample(benchmark::State& state) {
  std::vector<double> grid;
  for (int i = 0; i < state.range(0); ++i) grid.push_back(-2.0 + 4.0 * i / state.range(0));
  auto gg = karlin::make_gauss_grid(grid);
  std::uint64_t r = 0;
  for (auto _ : state) {
    karlin::RngStream rng(3, r++);
    benchmark::DoNotOptimize(karlin::sample_Z_cholesky(gg, rng).data());
  }
}
BENCHMARK(BM_cholesky_sample)->Arg(5)->Arg(50)->Arg(200);

void BM_whitenoise_sample(benchmark::State& state) {
  auto sampler = karlin::make_whitenoise_sampler(karlin::WhiteNoiseDiscretization{},
                                                 {-2.0, -1.0, 0.0, 1.0, 2.0});
  std::uint64_t r = 0;
  for (auto _ : state) {
    karlin::RngStream rng(4, r++);
    benchmark::DoNotOptimize(karlin::sample_Z_whitenoise(sampler, rng).data());
  }
}
BENCHMARK(BM_whitenoise_sample);

void BM_spectral_fourier(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(karlin::fourier_r(1.0));
}
BENCHMARK(BM_spectral_fourier);

}  // namespace

BENCHMARK_MAIN();
