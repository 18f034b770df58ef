#include <benchmark/benchmark.h>

#include <vector>

#include "riskavi/random.hpp"
#include "riskavi/risk.hpp"

using namespace riskavi;

namespace {

std::vector<double> sparse_costs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> c(n);
  for (auto& x : c) x = rng.uniform() < 0.2 ? rng.uniform() : 0.0;
  return c;
}

void BM_KdeFit(benchmark::State& state) {
  const auto costs = sparse_costs(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(kde_fit(costs, BandwidthRule::scott()));
}
BENCHMARK(BM_KdeFit)->Arg(128)->Arg(1024)->Arg(10000);

void BM_KdeCvar(benchmark::State& state) {
  const auto est = kde_fit(sparse_costs(128, 2), BandwidthRule::scott());
  for (auto _ : state) benchmark::DoNotOptimize(cvar_beta(est, 0.9));
}
BENCHMARK(BM_KdeCvar);

void BM_QrLoss(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto taus = make_tau_grid(n);
  Rng rng(3);
  std::vector<double> pred(n), targets(n);
  for (auto& x : pred) x = rng.normal();
  for (auto& x : targets) x = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(qr_loss(pred, targets, taus, 1.0));
}
BENCHMARK(BM_QrLoss)->Arg(32)->Arg(200);

}  // namespace
