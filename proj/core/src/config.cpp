#include "pocketrl/harness/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace pocketrl::harness {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& section) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key))
      throw ConfigError("unknown config key '" +
                        (section.empty() ? key : section + "." + key) + "'");
  }
}

template <class T>
void get_to(const json& j, const char* key, T& out, const std::string& section) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const json::exception&) {
    throw ConfigError("config key '" +
                      (section.empty() ? key : section + "." + key) +
                      "' has the wrong type");
  }
}

void parse_epsilon(const json& j, agents::EpsilonSchedule& eps,
                   const std::string& section) {
  get_to(j, "epsilon_start", eps.start, section);
  get_to(j, "epsilon_end", eps.end, section);
}

void parse_overrides(const json& j, AgentOverrides& over,
                     const std::string& section) {
  get_to(j, "timesteps", over.timesteps, section);
  get_to(j, "depth_min", over.depth_min, section);
  get_to(j, "depth_max", over.depth_max, section);
}

}  // namespace

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");

  ExperimentConfig c;
  check_keys(j,
             {"agent", "master_seed", "total_timesteps", "checkpoint_interval",
              "early_stop_evals", "env", "eval", "tabular", "dqn",
              "nodelambda"},
             "");
  get_to(j, "agent", c.agent, "");
  get_to(j, "master_seed", c.master_seed, "");
  get_to(j, "total_timesteps", c.total_timesteps, "");
  get_to(j, "checkpoint_interval", c.checkpoint_interval, "");
  get_to(j, "early_stop_evals", c.early_stop_evals, "");

  if (j.contains("env")) {
    const json& e = j.at("env");
    check_keys(e,
               {"max_steps", "scramble_depth_min", "scramble_depth_max",
                "reward_scheme"},
               "env");
    get_to(e, "max_steps", c.env.max_steps, "env");
    get_to(e, "scramble_depth_min", c.env.scramble_depth_min, "env");
    get_to(e, "scramble_depth_max", c.env.scramble_depth_max, "env");
    if (e.contains("reward_scheme")) {
      std::string scheme;
      get_to(e, "reward_scheme", scheme, "env");
      if (scheme == "sparse_goal")
        c.env.reward_scheme = env::RewardScheme::SparseGoal;
      else if (scheme == "step_penalty")
        c.env.reward_scheme = env::RewardScheme::StepPenalty;
      else
        throw ConfigError("env.reward_scheme must be 'sparse_goal' or "
                          "'step_penalty', got '" + scheme + "'");
    }
  }

  if (j.contains("eval")) {
    const json& e = j.at("eval");
    check_keys(e, {"cubes", "max_steps", "depth_min", "depth_max"}, "eval");
    get_to(e, "cubes", c.eval.cubes, "eval");
    get_to(e, "max_steps", c.eval.max_steps, "eval");
    get_to(e, "depth_min", c.eval.depth_min, "eval");
    get_to(e, "depth_max", c.eval.depth_max, "eval");
  }

  if (j.contains("tabular")) {
    const json& t = j.at("tabular");
    check_keys(t,
               {"alpha", "gamma", "b", "mirror", "epsilon_start",
                "epsilon_end", "timesteps", "depth_min", "depth_max"},
               "tabular");
    get_to(t, "alpha", c.tabular.alpha, "tabular");
    get_to(t, "gamma", c.tabular.gamma, "tabular");
    get_to(t, "b", c.tabular.b, "tabular");
    get_to(t, "mirror", c.tabular.mirror, "tabular");
    parse_epsilon(t, c.tabular.epsilon, "tabular");
    parse_overrides(t, c.tabular_over, "tabular");
  }

  if (j.contains("dqn")) {
    const json& d = j.at("dqn");
    check_keys(d,
               {"hidden", "replay_capacity", "batch_size", "sync_period",
                "train_freq", "warmup", "gamma", "lr", "b", "mirror",
                "epsilon_start", "epsilon_end", "timesteps", "depth_min",
                "depth_max"},
               "dqn");
    get_to(d, "hidden", c.dqn.hidden, "dqn");
    get_to(d, "replay_capacity", c.dqn.replay_capacity, "dqn");
    get_to(d, "batch_size", c.dqn.batch_size, "dqn");
    get_to(d, "sync_period", c.dqn.sync_period, "dqn");
    get_to(d, "train_freq", c.dqn.train_freq, "dqn");
    get_to(d, "warmup", c.dqn.warmup, "dqn");
    get_to(d, "gamma", c.dqn.gamma, "dqn");
    get_to(d, "lr", c.dqn.lr, "dqn");
    get_to(d, "b", c.dqn.b, "dqn");
    get_to(d, "mirror", c.dqn.mirror, "dqn");
    parse_epsilon(d, c.dqn.epsilon, "dqn");
    parse_overrides(d, c.dqn_over, "dqn");
  }

  if (j.contains("nodelambda")) {
    const json& n = j.at("nodelambda");
    check_keys(n,
               {"lambda", "b", "max_episodes", "recursion_cap", "ns_hidden",
                "d_hidden", "lr", "pretrain_ns_steps", "epsilon_start",
                "epsilon_end", "timesteps", "depth_min", "depth_max"},
               "nodelambda");
    get_to(n, "lambda", c.nodelambda.lambda, "nodelambda");
    get_to(n, "b", c.nodelambda.b, "nodelambda");
    if (n.contains("max_episodes")) {
      std::int64_t m = -1;  // -1 = unlimited (the default)
      get_to(n, "max_episodes", m, "nodelambda");
      if (m < -1) throw ConfigError("nodelambda.max_episodes must be >= -1");
      c.nodelambda.max_episodes =
          m == -1 ? std::numeric_limits<std::int64_t>::max() : m;
    }
    get_to(n, "recursion_cap", c.nodelambda.recursion_cap, "nodelambda");
    get_to(n, "ns_hidden", c.nodelambda.ns_hidden, "nodelambda");
    get_to(n, "d_hidden", c.nodelambda.d_hidden, "nodelambda");
    get_to(n, "lr", c.nodelambda.lr, "nodelambda");
    get_to(n, "pretrain_ns_steps", c.nodelambda.pretrain_ns_steps,
           "nodelambda");
    parse_epsilon(n, c.nodelambda.epsilon, "nodelambda");
    parse_overrides(n, c.nodelambda_over, "nodelambda");
  }

  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const ExperimentConfig& c) {
  agent_id(c.agent);
  if (c.total_timesteps < 1) throw ConfigError("total_timesteps must be >= 1");
  if (c.eval.cubes < 1) throw ConfigError("eval.cubes must be >= 1");
  if (c.eval.max_steps < 1) throw ConfigError("eval.max_steps must be >= 1");
  if (c.eval.depth_min < 1) throw ConfigError("eval.depth_min must be >= 1");
  if (c.eval.depth_max < c.eval.depth_min)
    throw ConfigError("eval.depth_max must be >= eval.depth_min");
  if (c.checkpoint_interval < 0)
    throw ConfigError("checkpoint_interval must be >= 0");
  if (c.early_stop_evals < 0)
    throw ConfigError("early_stop_evals must be >= 0");
  try {
    env::validate(c.env);
    for (const char* agent : {"random", "tabular", "dqn", "nodelambda"})
      env::validate(effective_env(c, agent));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("env: ") + e.what());
  }
  if (c.tabular.alpha <= 0 || c.tabular.alpha > 1)
    throw ConfigError("tabular.alpha must be in (0, 1]");
  for (const double g : {c.tabular.gamma, c.dqn.gamma})
    if (g < 0 || g > 1) throw ConfigError("gamma must be in [0, 1]");
  for (const double b : {c.tabular.b, c.dqn.b, c.nodelambda.b})
    if (b < 0 || b > 1) throw ConfigError("b must be in [0, 1]");
  if (c.dqn.batch_size < 1) throw ConfigError("dqn.batch_size must be >= 1");
  if (c.dqn.replay_capacity < c.dqn.batch_size)
    throw ConfigError("dqn.replay_capacity must be >= dqn.batch_size");
  if (c.dqn.sync_period < 1) throw ConfigError("dqn.sync_period must be >= 1");
  if (c.dqn.train_freq < 1) throw ConfigError("dqn.train_freq must be >= 1");
  if (c.nodelambda.lambda < 0)
    throw ConfigError("nodelambda.lambda must be >= 0");
  if (c.nodelambda.lambda > c.nodelambda.recursion_cap)
    throw ConfigError("nodelambda.lambda exceeds nodelambda.recursion_cap");
  if (c.nodelambda.pretrain_ns_steps < 0)
    throw ConfigError("nodelambda.pretrain_ns_steps must be >= 0");
  for (const AgentOverrides* o :
       {&c.tabular_over, &c.dqn_over, &c.nodelambda_over}) {
    if (o->timesteps < 0) throw ConfigError("timesteps override must be >= 0");
    if (o->depth_min < 0 || o->depth_max < 0)
      throw ConfigError("depth overrides must be >= 0");
  }
}

std::string to_json(const ExperimentConfig& c) {
  json j;
  j["agent"] = c.agent;
  j["master_seed"] = c.master_seed;
  j["total_timesteps"] = c.total_timesteps;
  j["checkpoint_interval"] = c.checkpoint_interval;
  j["early_stop_evals"] = c.early_stop_evals;
  j["env"] = {{"max_steps", c.env.max_steps},
              {"scramble_depth_min", c.env.scramble_depth_min},
              {"scramble_depth_max", c.env.scramble_depth_max},
              {"reward_scheme",
               c.env.reward_scheme == env::RewardScheme::SparseGoal
                   ? "sparse_goal"
                   : "step_penalty"}};
  j["eval"] = {{"cubes", c.eval.cubes},
               {"max_steps", c.eval.max_steps},
               {"depth_min", c.eval.depth_min},
               {"depth_max", c.eval.depth_max}};
  j["tabular"] = {{"alpha", c.tabular.alpha},
                  {"gamma", c.tabular.gamma},
                  {"b", c.tabular.b},
                  {"mirror", c.tabular.mirror},
                  {"epsilon_start", c.tabular.epsilon.start},
                  {"epsilon_end", c.tabular.epsilon.end},
                  {"timesteps", c.tabular_over.timesteps},
                  {"depth_min", c.tabular_over.depth_min},
                  {"depth_max", c.tabular_over.depth_max}};
  j["dqn"] = {{"hidden", c.dqn.hidden},
              {"replay_capacity", c.dqn.replay_capacity},
              {"batch_size", c.dqn.batch_size},
              {"sync_period", c.dqn.sync_period},
              {"train_freq", c.dqn.train_freq},
              {"warmup", c.dqn.warmup},
              {"gamma", c.dqn.gamma},
              {"lr", c.dqn.lr},
              {"b", c.dqn.b},
              {"mirror", c.dqn.mirror},
              {"epsilon_start", c.dqn.epsilon.start},
              {"epsilon_end", c.dqn.epsilon.end},
              {"timesteps", c.dqn_over.timesteps},
              {"depth_min", c.dqn_over.depth_min},
              {"depth_max", c.dqn_over.depth_max}};
  j["nodelambda"] = {
      {"lambda", c.nodelambda.lambda},
      {"b", c.nodelambda.b},
      {"max_episodes",
       c.nodelambda.max_episodes == std::numeric_limits<std::int64_t>::max()
           ? -1
           : c.nodelambda.max_episodes},
      {"recursion_cap", c.nodelambda.recursion_cap},
      {"ns_hidden", c.nodelambda.ns_hidden},
      {"d_hidden", c.nodelambda.d_hidden},
      {"lr", c.nodelambda.lr},
      {"pretrain_ns_steps", c.nodelambda.pretrain_ns_steps},
      {"epsilon_start", c.nodelambda.epsilon.start},
      {"epsilon_end", c.nodelambda.epsilon.end},
      {"timesteps", c.nodelambda_over.timesteps},
      {"depth_min", c.nodelambda_over.depth_min},
      {"depth_max", c.nodelambda_over.depth_max}};
  return j.dump(2);
}

std::string config_digest(const ExperimentConfig& c) {
  const std::string text = to_json(c);
  std::uint64_t h = 1469598103934665603ull;
  for (char ch : text) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::int64_t effective_timesteps(const ExperimentConfig& c,
                                 const std::string& agent) {
  const AgentOverrides* o = nullptr;
  if (agent == "tabular") o = &c.tabular_over;
  else if (agent == "dqn") o = &c.dqn_over;
  else if (agent == "nodelambda") o = &c.nodelambda_over;
  if (o && o->timesteps > 0) return o->timesteps;
  return c.total_timesteps;
}

env::EnvConfig effective_env(const ExperimentConfig& c,
                             const std::string& agent) {
  env::EnvConfig e = c.env;
  const AgentOverrides* o = nullptr;
  if (agent == "tabular") o = &c.tabular_over;
  else if (agent == "dqn") o = &c.dqn_over;
  else if (agent == "nodelambda") o = &c.nodelambda_over;
  if (o) {
    if (o->depth_min > 0) e.scramble_depth_min = o->depth_min;
    if (o->depth_max > 0) e.scramble_depth_max = o->depth_max;
  }
  return e;
}

int agent_id(const std::string& agent) {
  if (agent == "random") return 0;
  if (agent == "tabular") return 1;
  if (agent == "dqn") return 2;
  if (agent == "nodelambda") return 3;
  throw ConfigError("unknown agent '" + agent +
                    "' (expected random|tabular|dqn|nodelambda)");
}

}  // namespace pocketrl::harness
