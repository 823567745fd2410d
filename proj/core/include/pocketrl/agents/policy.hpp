#pragma once

#include <cstdint>
#include <random>

#include "pocketrl/cube.hpp"

namespace pocketrl::agents {

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  std::int64_t decay_steps = 1;

  double at(std::int64_t step) const {
    if (step >= decay_steps) return end;
    const double f =
        static_cast<double>(step) / static_cast<double>(decay_steps);
    return start + f * (end - start);
  }
};

// Common acting contract. act is deterministic given fixed parameters;
// explore_act takes a uniform random move with probability epsilon.
class AgentPolicy {
 public:
  virtual ~AgentPolicy() = default;
  virtual cube::Move act(const cube::CubeState& s) const = 0;

  cube::Move explore_act(const cube::CubeState& s, double epsilon,
                         std::mt19937_64& rng) const;
};

// Uniform draw over the 12 moves.
cube::Move random_act(std::mt19937_64& rng);

}  // namespace pocketrl::agents
