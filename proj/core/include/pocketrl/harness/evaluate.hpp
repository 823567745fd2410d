#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pocketrl/cube.hpp"
#include "pocketrl/harness/config.hpp"
#include "pocketrl/oracle.hpp"

namespace pocketrl::harness {

struct EvalReport {
  std::string agent;
  std::uint64_t seed = 0;
  int total = 0;
  int solved_count = 0;

  struct DepthStats {
    int attempted = 0;
    int solved = 0;
    double mean_steps = 0.0;  // over solved episodes at this nominal depth
  };
  std::map<int, DepthStats> per_depth;  // keyed by nominal scramble depth

  double mean_steps = 0.0;      // over solved episodes
  double optimality_gap = 0.0;  // mean (steps - oracle distance) over solved
  double wall_time = 0.0;       // seconds; diagnostic, not seed-determined
  std::int64_t timesteps = 0;   // training budget behind the evaluated model
  std::string config_digest;

  // Start states of unsolved episodes, for the structured report.
  std::vector<std::array<std::uint8_t, 24>> unsolved_starts;
};

using EvalPolicy =
    std::function<cube::Move(const cube::CubeState&, std::mt19937_64&)>;

// Runs eval.cubes greedy episodes. Episode e draws its own engine from
// derive_seed(master_seed, e), so all agents see the same cubes under the
// same master seed and parallel evaluation would equal serial. Each episode
// draws a depth uniformly in [depth_min, depth_max] and rescrambles at that
// depth if the scramble lands solved.
EvalReport evaluate(const EvalPolicy& policy, const EvalConfig& eval,
                    const oracle::DistanceTable& table,
                    std::uint64_t master_seed);

// Reference policy: strict oracle descent (solves everything optimally).
EvalPolicy oracle_greedy_policy(const oracle::DistanceTable& table);

}  // namespace pocketrl::harness
