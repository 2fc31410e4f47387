#include <benchmark/benchmark.h>

#include <random>

#include "fleetrisk/features.hpp"
#include "fleetrisk/learners.hpp"
#include "fleetrisk/scoring.hpp"
#include "fleetrisk/wavelet.hpp"

using namespace fleetrisk;

static std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

static void BM_dwt_db4(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    auto c = dwt_db4(x, 1);
    benchmark::DoNotOptimize(c.approx.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_dwt_db4)->Arg(10)->Arg(64)->Arg(1024);

static void BM_dwt_roundtrip(benchmark::State& state) {
  const auto x = noise(64, 2);
  for (auto _ : state) {
    auto y = idwt_db4(dwt_db4(x, 3));
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_dwt_roundtrip);

static void BM_macro_f1(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(0, 2);
  std::vector<RiskLabel> t(n), p(n);
  std::vector<Generation> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = label_from_index(pick(rng));
    p[i] = label_from_index(pick(rng));
    g[i] = i % 2 ? Generation::Gen2 : Generation::Gen1;
  }
  for (auto _ : state) benchmark::DoNotOptimize(challenge_score(t, p, g).final_score);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_macro_f1)->Arg(1000)->Arg(33590);

static void BM_ensemble_score(benchmark::State& state) {
  const std::size_t cols = 21;
  Dataset x(cols);
  std::vector<int> y;
  for (int i = 0; i < 200; ++i) {
    x.push_row(noise(cols, 10 + i));
    y.push_back(i % 3 == 0);
  }
  TrainingHyper hyper{.epochs = 20, .hidden_sizes = {8}, .dropout_rate = 0.1};
  const auto ens = ensemble_fit(x, y, 5, hyper);
  Rng rng(4);
  const auto row = noise(cols, 99);
  for (auto _ : state) benchmark::DoNotOptimize(ensemble_score(ens, row, 20, rng));
}
BENCHMARK(BM_ensemble_score);

static void BM_quantile_shift(benchmark::State& state) {
  FleetTable t;
  t.n_features = 20;
  for (int i = 0; i < 5000; ++i) {
    t.rows.push_back({i + 1, "C", Generation::Gen1, std::nullopt, noise(20, 500 + i)});
  }
  for (auto _ : state) {
    auto out = quantile_shift_normalize(t, 0.005, SplitKey::Train);
    benchmark::DoNotOptimize(out.rows.data());
  }
}
BENCHMARK(BM_quantile_shift);
BENCHMARK_MAIN();
