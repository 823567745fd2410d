#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "pocketrl/cube.hpp"

namespace pocketrl::env {

// Deterministic, reversible, goal-based cube environment plus rollout
// generation, including the backward-from-solved curriculum.

enum class RewardScheme { SparseGoal, StepPenalty };

struct EnvConfig {
  int max_steps = 50;
  int scramble_depth_min = 1;
  int scramble_depth_max = 14;
  RewardScheme reward_scheme = RewardScheme::SparseGoal;
  std::uint64_t seed = 0;
};

// Throws ConfigError (see harness/config.hpp) via std::invalid_argument on
// violated invariants: 1 <= depth_min <= depth_max, max_steps >= 1.
void validate(const EnvConfig& config);

struct Transition {
  cube::CubeState s;
  cube::Move a;
  cube::CubeState s_next;
  double reward = 0.0;
  bool is_done = false;  // goal reached; truncation is reported separately
};

struct Trajectory {
  std::vector<Transition> transitions;
  bool truncated = false;
  bool backward = false;  // generated by the backward-from-solved curriculum
};

// Scrambles to a uniformly drawn depth in [depth_min, depth_max],
// re-scrambling if the walk happens to land on a solved state.
cube::CubeState reset(const EnvConfig& config, std::mt19937_64& rng);

struct StepOutcome {
  Transition transition;
  bool truncated = false;  // step budget exhausted without reaching the goal
};

StepOutcome step(const cube::CubeState& s, cube::Move a, int steps_taken,
                 const EnvConfig& config);

using PolicyFn =
    std::function<cube::Move(const cube::CubeState&, std::mt19937_64&)>;

// With probability b, emits a backward rollout: scramble k moves from the
// goal and reverse the path, so the trajectory is a guaranteed solving path
// (cut short at the first transition that reaches the goal). Otherwise
// resets and follows `policy` until solved or max_steps.
Trajectory generate_rollout(const PolicyFn& policy, double b,
                            const EnvConfig& config, std::mt19937_64& rng);

}  // namespace pocketrl::env
