#include <benchmark/benchmark.h>

#include <random>

#include "pocketrl/nn.hpp"

using namespace pocketrl::nn;

namespace {

Matrix random_input(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Matrix x(rows, cols);
  for (double& v : x.data) v = dist(rng);
  return x;
}

}  // namespace

static void BM_Forward(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const MLP net = he_init({144, 256, 144}, rng);
  const Matrix x = random_input(static_cast<int>(state.range(0)), 144, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(net, x));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(1)->Arg(12)->Arg(64);

static void BM_ForwardBackwardAdam(benchmark::State& state) {
  std::mt19937_64 rng(1);
  MLP net = he_init({144, 256, 144}, rng);
  AdamState adam = make_adam(net);
  const int batch = static_cast<int>(state.range(0));
  const Matrix x = random_input(batch, 144, 2);
  Matrix target(batch, 144);
  for (int r = 0; r < batch; ++r) target.at(r, (r * 7) % 144) = 1.0;
  ForwardCache cache;
  Gradients grads;
  BackwardScratch scratch;
  for (auto _ : state) {
    forward(net, x, &cache);
    backward_into(net, cache, LossSpec::mse(), target, grads, scratch);
    adam_step(net, grads, adam);
    benchmark::DoNotOptimize(net);
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_ForwardBackwardAdam)->Arg(1)->Arg(64);
