#pragma once

#include <cstdint>
#include <string>

#include "pocketrl/agents/dqn.hpp"
#include "pocketrl/agents/node_lambda.hpp"
#include "pocketrl/agents/tabular.hpp"
#include "pocketrl/env.hpp"
#include "pocketrl/errors.hpp"

namespace pocketrl::harness {

struct EvalConfig {
  int cubes = 1000;
  int max_steps = 50;
  int depth_min = 1;
  int depth_max = 14;  // quarter-turn diameter of the pocket cube
};

// Per-agent training overrides; zero means "inherit the global value".
struct AgentOverrides {
  std::int64_t timesteps = 0;
  int depth_min = 0;
  int depth_max = 0;
};

struct ExperimentConfig {
  std::string agent = "tabular";  // random | tabular | dqn | nodelambda
  std::uint64_t master_seed = 1;
  std::int64_t total_timesteps = 500'000;
  std::int64_t checkpoint_interval = 0;  // timesteps between checkpoints; 0 off
  int early_stop_evals = 0;  // episodes per periodic solve-rate probe; 0 off

  env::EnvConfig env;  // training environment (seed ignored; master_seed rules)
  EvalConfig eval;

  agents::TabularConfig tabular;
  agents::DQNConfig dqn;
  agents::NodeLambdaConfig nodelambda;

  AgentOverrides tabular_over{1'000'000, 13, 14};
  AgentOverrides dqn_over{500'000, 0, 0};
  AgentOverrides nodelambda_over{500'000, 0, 10};
};

ExperimentConfig default_config();

// Strict JSON: unknown keys, wrong types, and violated invariants all throw
// ConfigError naming the offending key.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

void validate(const ExperimentConfig& config);

// Canonical serialization; digest is FNV-1a over it.
std::string to_json(const ExperimentConfig& config);
std::string config_digest(const ExperimentConfig& config);

// Effective training budget / environment for one agent, after overrides.
std::int64_t effective_timesteps(const ExperimentConfig& config,
                                 const std::string& agent);
env::EnvConfig effective_env(const ExperimentConfig& config,
                             const std::string& agent);

// Fixed stream indices for seed derivation (see rng.hpp).
int agent_id(const std::string& agent);  // throws ConfigError on unknown name
inline constexpr std::uint64_t kInitStream = 0x1000;
inline constexpr std::uint64_t kTrainStream = 0x2000;

}  // namespace pocketrl::harness
