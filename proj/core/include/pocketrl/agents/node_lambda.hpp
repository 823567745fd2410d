#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pocketrl/agents/policy.hpp"
#include "pocketrl/env.hpp"
#include "pocketrl/nn.hpp"

namespace pocketrl::agents {

// Model-based distance learner: one distance head plus twelve per-move
// next-state networks used as a learned transition model. Distance targets
// bootstrap through lambda steps of lookahead in the learned model, always
// descending into the successor whose predicted distance is smallest.

struct NodeLambdaConfig {
  int lambda = 1;
  double b = 0.9;  // backward-rollout probability
  std::int64_t max_episodes = std::numeric_limits<std::int64_t>::max();  // M
  int recursion_cap = 2;  // upper bound accepted for lambda
  std::vector<int> ns_hidden = {256};
  std::vector<int> d_hidden = {256, 256};
  nn::OutputActivation d_output = nn::OutputActivation::Softplus;
  double lr = 1e-3;
  EpsilonSchedule epsilon;
  std::int64_t pretrain_ns_steps = 0;  // optional transition-model warmup
};

// Recursion core, parameterized over the transition and distance models so
// tests can run it against exact components. next_state(a, s) -> predicted
// successor; distance_of(states) -> batched distance estimates.
template <class NextFn, class DistFn>
double distance_to_goal_generic(int lambda, const cube::CubeState& s,
                                NextFn&& next_state, DistFn&& distance_of) {
  if (cube::is_solved(s)) return 0.0;
  if (lambda <= 0) {
    const std::array<cube::CubeState, 1> one{s};
    return distance_of(std::span<const cube::CubeState>(one))[0];
  }
  std::array<cube::CubeState, cube::kNumMoves> succ;
  for (int a = 0; a < cube::kNumMoves; ++a)
    succ[static_cast<std::size_t>(a)] = next_state(static_cast<cube::Move>(a), s);
  const auto d = distance_of(std::span<const cube::CubeState>(succ));
  int best = 0;
  for (int a = 1; a < cube::kNumMoves; ++a)
    if (d[static_cast<std::size_t>(a)] < d[static_cast<std::size_t>(best)])
      best = a;  // strict <: ties stay with the lowest move ordinal
  return 1.0 + distance_to_goal_generic(lambda - 1,
                                        succ[static_cast<std::size_t>(best)],
                                        next_state, distance_of);
}

// Greedy acting rule over the same components: a predicted solving move wins
// outright (lowest ordinal among them); otherwise pick the successor with
// the smallest looked-ahead distance, with lambda capped at 1 for bounded
// acting latency.
template <class NextFn, class DistFn>
cube::Move act_generic(int lambda, const cube::CubeState& s,
                       NextFn&& next_state, DistFn&& distance_of) {
  std::array<cube::CubeState, cube::kNumMoves> succ;
  for (int a = 0; a < cube::kNumMoves; ++a) {
    succ[static_cast<std::size_t>(a)] = next_state(static_cast<cube::Move>(a), s);
    if (cube::is_solved(succ[static_cast<std::size_t>(a)]))
      return static_cast<cube::Move>(a);
  }
  const int lambda_act = std::min(lambda, 1);
  int best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (int a = 0; a < cube::kNumMoves; ++a) {
    const double score =
        1.0 + distance_to_goal_generic(lambda_act,
                                       succ[static_cast<std::size_t>(a)],
                                       next_state, distance_of);
    if (score < best_score) {
      best_score = score;
      best = a;
    }
  }
  return static_cast<cube::Move>(best);
}

class NodeLambda : public AgentPolicy {
 public:
  NodeLambda(const NodeLambdaConfig& config, std::mt19937_64& init_rng);

  // 0 when solved; the raw distance head at lambda 0; otherwise one plus the
  // recursion into the predicted successor of smallest estimated distance.
  double distance_to_goal(int lambda, const cube::CubeState& s) const;

  cube::Move act(const cube::CubeState& s) const override;

  // Snapped prediction of apply_move(s, a) through the learned model.
  cube::SnapResult predict_next(cube::Move a, const cube::CubeState& s) const;

  const NodeLambdaConfig& config() const { return config_; }
  const nn::MLP& distance_net() const { return theta_d_; }
  const nn::MLP& next_state_net(cube::Move a) const {
    return theta_ns_[static_cast<std::size_t>(a)];
  }
  // Snapped predictions whose color counts were invalid (diagnostic).
  std::uint64_t invalid_snap_count() const { return invalid_snaps_; }

  void save(const std::string& path) const;
  static NodeLambda load(const std::string& path,
                         const NodeLambdaConfig& config);

 private:
  friend struct NodeLambdaTrainer;

  NodeLambdaConfig config_;
  nn::MLP theta_d_;
  std::array<nn::MLP, cube::kNumMoves> theta_ns_;
  mutable std::uint64_t invalid_snaps_ = 0;
};

struct NodeLambdaTrainLog {
  struct Episode {
    std::int64_t episode = 0;
    bool backward = false;
    int length = 0;
    bool solved = false;
    double mean_loss_ns = 0.0;
    double mean_loss_d = 0.0;
  };
  std::vector<Episode> episodes;
  // Update order as (episode, transition index within its trajectory);
  // trajectories are consumed last-to-first.
  std::vector<std::pair<std::int64_t, int>> consumed;
  std::int64_t timesteps = 0;
};

// Invoked after every episode; return false to stop training early.
using EpisodeCallback = std::function<bool(const NodeLambdaTrainLog&)>;

// Runs until max_episodes (config M) or until max_timesteps transitions have
// been consumed, whichever comes first.
NodeLambdaTrainLog node_lambda_train(NodeLambda& agent,
                                     const env::EnvConfig& env_config,
                                     std::int64_t max_timesteps,
                                     std::mt19937_64& rng,
                                     const EpisodeCallback& on_episode = {});

}  // namespace pocketrl::agents
