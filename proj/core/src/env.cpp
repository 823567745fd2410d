#include "pocketrl/env.hpp"

#include <stdexcept>

namespace pocketrl::env {

namespace {

double reward_for(RewardScheme scheme, bool solved) {
  switch (scheme) {
    case RewardScheme::SparseGoal:
      return solved ? 1.0 : 0.0;
    case RewardScheme::StepPenalty:
      return solved ? 0.0 : -1.0;
  }
  return 0.0;
}

}  // namespace

void validate(const EnvConfig& config) {
  if (config.scramble_depth_min < 1)
    throw std::invalid_argument("scramble_depth_min must be >= 1");
  if (config.scramble_depth_max < config.scramble_depth_min)
    throw std::invalid_argument(
        "scramble_depth_max must be >= scramble_depth_min");
  if (config.max_steps < 1)
    throw std::invalid_argument("max_steps must be >= 1");
}

cube::CubeState reset(const EnvConfig& config, std::mt19937_64& rng) {
  validate(config);
  std::uniform_int_distribution<int> depth_dist(config.scramble_depth_min,
                                                config.scramble_depth_max);
  while (true) {
    const int depth = depth_dist(rng);
    cube::CubeState s = cube::scramble(depth, rng).state;
    if (!cube::is_solved(s)) return s;
  }
}

StepOutcome step(const cube::CubeState& s, cube::Move a, int steps_taken,
                 const EnvConfig& config) {
  StepOutcome out{};
  out.transition.s = s;
  out.transition.a = a;
  out.transition.s_next = cube::apply_move(s, a);
  out.transition.is_done = cube::is_solved(out.transition.s_next);
  out.transition.reward =
      reward_for(config.reward_scheme, out.transition.is_done);
  out.truncated = !out.transition.is_done && steps_taken + 1 >= config.max_steps;
  return out;
}

Trajectory generate_rollout(const PolicyFn& policy, double b,
                            const EnvConfig& config, std::mt19937_64& rng) {
  validate(config);
  if (b < 0.0 || b > 1.0) throw std::invalid_argument("b must be in [0, 1]");

  Trajectory out{};
  const bool backward =
      std::uniform_real_distribution<double>(0.0, 1.0)(rng) < b;

  if (backward) {
    out.backward = true;
    std::uniform_int_distribution<int> depth_dist(config.scramble_depth_min,
                                                  config.scramble_depth_max);
    const int depth = depth_dist(rng);
    const cube::ScrambleResult sc = cube::scramble(depth, rng);

    // states[i] = position after i scramble moves.
    std::vector<cube::CubeState> states;
    states.reserve(static_cast<std::size_t>(depth) + 1);
    states.push_back(cube::solved());
    for (cube::Move m : sc.moves)
      states.push_back(cube::apply_move(states.back(), m));

    out.transitions.reserve(static_cast<std::size_t>(depth));
    for (int i = depth; i >= 1; --i) {
      Transition t{};
      t.s = states[i];
      t.a = cube::inverse(sc.moves[static_cast<std::size_t>(i) - 1]);
      t.s_next = states[i - 1];
      t.is_done = cube::is_solved(t.s_next);
      t.reward = reward_for(config.reward_scheme, t.is_done);
      out.transitions.push_back(t);
      if (t.is_done) break;  // a path through the goal terminates there
    }
    return out;
  }

  cube::CubeState s = reset(config, rng);
  for (int step_i = 0; step_i < config.max_steps; ++step_i) {
    const cube::Move a = policy(s, rng);
    StepOutcome so = step(s, a, step_i, config);
    s = so.transition.s_next;
    const bool done = so.transition.is_done;
    out.transitions.push_back(std::move(so.transition));
    if (done) break;
    if (so.truncated) {
      out.truncated = true;
      break;
    }
  }
  return out;
}

}  // namespace pocketrl::env
