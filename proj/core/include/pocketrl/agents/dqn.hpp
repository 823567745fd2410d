#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pocketrl/agents/policy.hpp"
#include "pocketrl/env.hpp"
#include "pocketrl/nn.hpp"

namespace pocketrl::agents {

struct DQNConfig {
  std::vector<int> hidden = {128, 128};
  int replay_capacity = 100000;
  int batch_size = 64;
  int sync_period = 1000;  // train calls between target <- online copies
  int train_freq = 4;      // env transitions per train call
  int warmup = 1000;       // minimum replay size before training starts
  double gamma = 0.9;
  double lr = 1e-3;
  EpsilonSchedule epsilon;
  double b = 0.95;     // backward-rollout probability during training
  bool mirror = true;  // also push the reflection of each transition
};

// Hand-built DQN: online/target value networks over the 144-dim one-hot
// observation, uniform replay, MSE on the taken-action values.
class DQNAgent : public AgentPolicy {
 public:
  DQNAgent(const DQNConfig& config, std::mt19937_64& init_rng);

  cube::Move act(const cube::CubeState& s) const override;

  void push(const env::Transition& t);
  std::size_t replay_size() const { return replay_.size(); }

  struct TrainResult {
    bool trained = false;  // false: replay below batch/warmup, no-op
    double loss = 0.0;
  };
  TrainResult train_step(std::mt19937_64& rng);

  const nn::MLP& online() const { return online_; }
  const nn::MLP& target() const { return target_; }
  const DQNConfig& config() const { return config_; }
  std::int64_t train_calls() const { return train_calls_; }

  void save(const std::string& path) const;
  static DQNAgent load(const std::string& path, const DQNConfig& config);

 private:
  DQNConfig config_;
  nn::MLP online_;
  nn::MLP target_;
  nn::AdamState adam_;
  std::vector<env::Transition> replay_;  // ring buffer
  std::size_t replay_next_ = 0;
  std::int64_t train_calls_ = 0;

  // Reused training buffers (batch-sized allocations are not cheap).
  nn::Matrix x_;
  nn::Matrix x_next_;
  nn::Matrix target_mat_;
  nn::ForwardCache cache_;
  nn::Gradients grads_;
  nn::BackwardScratch scratch_;
};

}  // namespace pocketrl::agents
