#pragma once

#include <memory>
#include <string>

#include "pocketrl/agents/policy.hpp"
#include "pocketrl/harness/config.hpp"
#include "pocketrl/harness/evaluate.hpp"

namespace pocketrl::harness {

struct TrainResult {
  std::string model_path;
  std::string log_path;
  std::int64_t timesteps = 0;
  std::int64_t episodes = 0;
  bool early_stopped = false;
};

// Trains config.agent for its effective budget, saving the model to
// <out_dir>/<agent>.nlrl and a per-episode CSV log next to it. Deterministic
// in (config, master_seed). Throws ConfigError for agent "random".
TrainResult train(const ExperimentConfig& config, const std::string& out_dir);

struct LoadedAgent {
  std::unique_ptr<agents::AgentPolicy> policy;  // null for "random"
  EvalPolicy eval_policy;
};

// Instantiates an evaluation policy for config.agent; model_path is ignored
// for "random".
LoadedAgent load_agent(const ExperimentConfig& config,
                       const std::string& model_path);

}  // namespace pocketrl::harness
