#include <benchmark/benchmark.h>

#include <random>

#include "pocketrl/cube.hpp"

using namespace pocketrl::cube;

static void BM_ApplyMove(benchmark::State& state) {
  std::mt19937_64 rng(1);
  CubeState s = scramble(20, rng).state;
  int m = 0;
  for (auto _ : state) {
    s = apply_move(s, static_cast<Move>(m));
    m = (m + 5) % kNumMoves;
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_ApplyMove);

static void BM_Canonicalize(benchmark::State& state) {
  std::mt19937_64 rng(2);
  CubeState s = scramble(20, rng).state;
  for (auto _ : state) {
    benchmark::DoNotOptimize(canonicalize(s));
  }
}
BENCHMARK(BM_Canonicalize);

static void BM_RankUnrank(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint32_t> dist(0, kStateCount - 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank(unrank(CanonicalIndex{dist(rng)})));
  }
}
BENCHMARK(BM_RankUnrank);

static void BM_EncodeSnap(benchmark::State& state) {
  std::mt19937_64 rng(4);
  CubeState s = scramble(20, rng).state;
  for (auto _ : state) {
    benchmark::DoNotOptimize(snap(encode(s)));
  }
}
BENCHMARK(BM_EncodeSnap);

BENCHMARK_MAIN();
