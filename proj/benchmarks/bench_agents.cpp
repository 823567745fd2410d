#include <benchmark/benchmark.h>

#include <random>

#include "pocketrl/agents/node_lambda.hpp"

using namespace pocketrl;

static void BM_DistanceToGoal(benchmark::State& state) {
  std::mt19937_64 rng(1);
  agents::NodeLambdaConfig config;
  config.lambda = static_cast<int>(state.range(0));
  agents::NodeLambda agent(config, rng);
  const cube::CubeState s = cube::scramble(10, rng).state;
  for (auto _ : state) {
    benchmark::DoNotOptimize(agent.distance_to_goal(config.lambda, s));
  }
}
BENCHMARK(BM_DistanceToGoal)->Arg(0)->Arg(1)->Arg(2);

static void BM_NodeLambdaAct(benchmark::State& state) {
  std::mt19937_64 rng(2);
  agents::NodeLambdaConfig config;
  agents::NodeLambda agent(config, rng);
  const cube::CubeState s = cube::scramble(10, rng).state;
  for (auto _ : state) {
    benchmark::DoNotOptimize(agent.act(s));
  }
}
BENCHMARK(BM_NodeLambdaAct);
