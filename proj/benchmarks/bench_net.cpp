#include <benchmark/benchmark.h>

#include "riskavi/quantile_net.hpp"
#include "riskavi/random.hpp"

using namespace riskavi;

namespace {

// Default topology: 52 -> 120 -> 84 -> 5 x 32.
void BM_ForwardBatch(benchmark::State& state) {
  const NetworkShape shape;
  const auto params = init_network(shape, 1);
  const Eigen::MatrixXd obs = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(shape.obs_dim), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(forward_batch(params, obs));
}
BENCHMARK(BM_ForwardBatch)->Arg(1)->Arg(128);

void BM_BackwardBatch(benchmark::State& state) {
  const NetworkShape shape;
  const auto params = init_network(shape, 1);
  const Eigen::MatrixXd obs = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(shape.obs_dim), state.range(0));
  const auto cache = forward_batch(params, obs);
  const Eigen::MatrixXd dout = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(shape.output_dim()), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(backward_batch(params, cache, dout));
}
BENCHMARK(BM_BackwardBatch)->Arg(128);

void BM_AdamStep(benchmark::State& state) {
  const NetworkShape shape;
  auto params = init_network(shape, 1);
  auto grads = init_network(shape, 2);
  OptimizerState opt;
  for (auto _ : state) step(params, grads, opt);
}
BENCHMARK(BM_AdamStep);

}  // namespace
