#include "pocketrl/harness/evaluate.hpp"

#include <chrono>

#include "pocketrl/rng.hpp"

namespace pocketrl::harness {

EvalReport evaluate(const EvalPolicy& policy, const EvalConfig& eval,
                    const oracle::DistanceTable& table,
                    std::uint64_t master_seed) {
  const auto t0 = std::chrono::steady_clock::now();

  EvalReport report;
  report.seed = master_seed;
  report.total = eval.cubes;

  double steps_sum = 0.0;
  double gap_sum = 0.0;
  std::map<int, double> depth_steps_sum;

  for (int e = 0; e < eval.cubes; ++e) {
    std::mt19937_64 rng = make_engine(master_seed, static_cast<std::uint64_t>(e));
    std::uniform_int_distribution<int> depth_dist(eval.depth_min,
                                                  eval.depth_max);
    const int depth = depth_dist(rng);
    cube::CubeState s = cube::scramble(depth, rng).state;
    while (cube::is_solved(s)) s = cube::scramble(depth, rng).state;
    const cube::CubeState start = s;

    int steps = 0;
    while (!cube::is_solved(s) && steps < eval.max_steps) {
      s = cube::apply_move(s, policy(s, rng));
      ++steps;
    }
    const bool solved = cube::is_solved(s);

    auto& ds = report.per_depth[depth];
    ++ds.attempted;
    if (solved) {
      ++ds.solved;
      ++report.solved_count;
      steps_sum += steps;
      depth_steps_sum[depth] += steps;
      gap_sum += steps - oracle::optimal_distance(table, start);
    } else {
      report.unsolved_starts.push_back(cube::to_bytes(start));
    }
  }

  for (auto& [depth, ds] : report.per_depth)
    if (ds.solved > 0) ds.mean_steps = depth_steps_sum[depth] / ds.solved;
  if (report.solved_count > 0) {
    report.mean_steps = steps_sum / report.solved_count;
    report.optimality_gap = gap_sum / report.solved_count;
  }

  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

EvalPolicy oracle_greedy_policy(const oracle::DistanceTable& table) {
  return [&table](const cube::CubeState& s, std::mt19937_64&) {
    return oracle::optimal_move(table, s);
  };
}

}  // namespace pocketrl::harness
