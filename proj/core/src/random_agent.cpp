#include "pocketrl/agents/policy.hpp"

namespace pocketrl::agents {

cube::Move random_act(std::mt19937_64& rng) {
  return static_cast<cube::Move>(
      std::uniform_int_distribution<int>(0, cube::kNumMoves - 1)(rng));
}

cube::Move AgentPolicy::explore_act(const cube::CubeState& s, double epsilon,
                                    std::mt19937_64& rng) const {
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < epsilon)
    return random_act(rng);
  return act(s);
}

}  // namespace pocketrl::agents
