#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>

#include "pocketrl/agents/policy.hpp"
#include "pocketrl/env.hpp"

namespace pocketrl::agents {

struct TabularConfig {
  double alpha = 0.1;
  double gamma = 0.9;
  EpsilonSchedule epsilon;
  double b = 1.0;      // backward-rollout probability during training
  bool mirror = true;  // also train on the reflection of each transition
};

// Image of a transition under the left-right reflection automorphism
// (mirrored sticker positions, L/R colors swapped, mirrored move). Used for
// data augmentation: every observed transition implies its mirror.
env::Transition mirror_transition(const env::Transition& t);

// Tabular Q-learning over canonical states. States are canonicalized before
// lookup and actions are conjugated into the canonical frame, so the table
// is a well-defined function of the rotation-quotiented MDP. Rows default
// to all zeros and are populated lazily.
class TabularQ : public AgentPolicy {
 public:
  explicit TabularQ(TabularConfig config = {}) : config_(config) {}

  // Greedy argmax. Ties (including fully unvisited rows) break by a fixed
  // hash of the canonical index, so unlearned regions walk deterministically
  // instead of cycling on one face.
  cube::Move act(const cube::CubeState& s) const override;

  // Q(s, a) in the quotient MDP (lookup is canonicalized + conjugated).
  double q_value(const cube::CubeState& s, cube::Move a) const;

  std::size_t table_size() const { return q_.size(); }
  const TabularConfig& config() const { return config_; }

  void save(const std::string& path) const;
  static TabularQ load(const std::string& path, TabularConfig config = {});

  friend void tabular_update(TabularQ& agent, const env::Transition& t);

 private:
  TabularConfig config_;
  std::unordered_map<std::uint32_t, std::array<double, cube::kNumMoves>> q_;
};

// Q(s,a) += alpha * (r + gamma * (0 if done else max_a' Q(s',a')) - Q(s,a)).
void tabular_update(TabularQ& agent, const env::Transition& t);

}  // namespace pocketrl::agents
