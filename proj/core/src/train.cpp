#include "pocketrl/harness/train.hpp"

#include <filesystem>
#include <fstream>

#include "pocketrl/rng.hpp"

namespace pocketrl::harness {
namespace {

constexpr std::uint64_t kProbeStream = 0x4000;

struct EpisodeLogger {
  std::ofstream out;

  explicit EpisodeLogger(const std::string& path) : out(path, std::ios::trunc) {
    if (!out) throw IoError("cannot open training log: " + path);
    out << "episode,timesteps,backward,length,solved,loss\n";
  }

  void log(std::int64_t episode, std::int64_t timesteps, bool backward,
           int length, bool solved, double loss) {
    out << episode << ',' << timesteps << ',' << (backward ? 1 : 0) << ','
        << length << ',' << (solved ? 1 : 0) << ',' << loss << '\n';
  }
};

// Greedy solve-rate probe for optional early stopping (oracle-free).
double probe_solve_rate(const agents::AgentPolicy& policy,
                        const ExperimentConfig& config, int episodes,
                        std::uint64_t probe_index) {
  int solved = 0;
  for (int e = 0; e < episodes; ++e) {
    std::mt19937_64 rng = make_engine(
        config.master_seed, kProbeStream + probe_index * 7919 +
                                static_cast<std::uint64_t>(e));
    std::uniform_int_distribution<int> depth_dist(config.eval.depth_min,
                                                  config.eval.depth_max);
    const int depth = depth_dist(rng);
    cube::CubeState s = cube::scramble(depth, rng).state;
    while (cube::is_solved(s)) s = cube::scramble(depth, rng).state;
    for (int step = 0; step < config.eval.max_steps && !cube::is_solved(s);
         ++step)
      s = cube::apply_move(s, policy.act(s));
    if (cube::is_solved(s)) ++solved;
  }
  return episodes > 0 ? static_cast<double>(solved) / episodes : 0.0;
}

// Tracks periodic checkpoints and the early-stop rule (two consecutive
// probes more than five points below the best seen).
struct TrainSupervisor {
  const ExperimentConfig& config;
  const agents::AgentPolicy& policy;
  std::int64_t budget;
  std::string ckpt_prefix;
  std::function<void(const std::string&)> save_fn;

  std::int64_t next_ckpt = 0;
  std::int64_t next_probe = 0;
  std::uint64_t probe_index = 0;
  double best_rate = -1.0;
  int strikes = 0;
  bool stopped_early = false;

  TrainSupervisor(const ExperimentConfig& cfg, const agents::AgentPolicy& pol,
                  std::int64_t total, std::string prefix,
                  std::function<void(const std::string&)> save)
      : config(cfg),
        policy(pol),
        budget(total),
        ckpt_prefix(std::move(prefix)),
        save_fn(std::move(save)) {
    next_ckpt =
        config.checkpoint_interval > 0 ? config.checkpoint_interval : -1;
    next_probe = config.early_stop_evals > 0 ? std::max<std::int64_t>(
                                                   budget / 10, 1)
                                             : -1;
  }

  // Returns false when training should stop.
  bool on_progress(std::int64_t timesteps) {
    if (next_ckpt > 0 && timesteps >= next_ckpt) {
      save_fn(ckpt_prefix + "_ckpt_" + std::to_string(timesteps) + ".nlrl");
      next_ckpt += config.checkpoint_interval;
    }
    if (next_probe > 0 && timesteps >= next_probe) {
      const double rate = probe_solve_rate(policy, config,
                                           config.early_stop_evals,
                                           probe_index++);
      if (rate < best_rate - 0.05) {
        if (++strikes >= 2) {
          stopped_early = true;
          return false;
        }
      } else {
        strikes = 0;
      }
      best_rate = std::max(best_rate, rate);
      next_probe += std::max<std::int64_t>(budget / 10, 1);
    }
    return true;
  }
};

TrainResult train_tabular(const ExperimentConfig& config,
                          const std::string& out_dir) {
  const std::int64_t budget = effective_timesteps(config, "tabular");
  const env::EnvConfig env_config = effective_env(config, "tabular");

  agents::TabularConfig agent_config = config.tabular;
  agent_config.epsilon.decay_steps = std::max<std::int64_t>(budget / 2, 1);
  agents::TabularQ agent(agent_config);

  std::mt19937_64 rng =
      make_engine(config.master_seed, kTrainStream + agent_id("tabular"));

  TrainResult result;
  result.model_path = out_dir + "/tabular.nlrl";
  result.log_path = out_dir + "/tabular_train_log.csv";
  EpisodeLogger logger(result.log_path);
  TrainSupervisor sup(config, agent, budget, out_dir + "/tabular",
                      [&](const std::string& p) { agent.save(p); });

  env::PolicyFn explore = [&](const cube::CubeState& s, std::mt19937_64& r) {
    return agent.explore_act(s, agent_config.epsilon.at(result.timesteps), r);
  };

  while (result.timesteps < budget) {
    const env::Trajectory traj =
        env::generate_rollout(explore, agent_config.b, env_config, rng);
    double td_sum = 0.0;
    int consumed = 0;
    // Goal-side first: values propagate outward along the rollout.
    for (int i = static_cast<int>(traj.transitions.size()) - 1;
         i >= 0 && result.timesteps < budget; --i) {
      const env::Transition& t = traj.transitions[static_cast<std::size_t>(i)];
      const double before = agent.q_value(t.s, t.a);
      agents::tabular_update(agent, t);
      if (agent_config.mirror)
        agents::tabular_update(agent, agents::mirror_transition(t));
      td_sum += std::abs(agent.q_value(t.s, t.a) - before);
      ++result.timesteps;
      ++consumed;
    }
    logger.log(result.episodes, result.timesteps, traj.backward,
               static_cast<int>(traj.transitions.size()),
               !traj.transitions.empty() && traj.transitions.back().is_done,
               consumed > 0 ? td_sum / consumed : 0.0);
    ++result.episodes;
    if (!sup.on_progress(result.timesteps)) break;
  }
  result.early_stopped = sup.stopped_early;
  agent.save(result.model_path);
  return result;
}

TrainResult train_dqn(const ExperimentConfig& config,
                      const std::string& out_dir) {
  const std::int64_t budget = effective_timesteps(config, "dqn");
  const env::EnvConfig env_config = effective_env(config, "dqn");

  agents::DQNConfig agent_config = config.dqn;
  agent_config.epsilon.decay_steps = std::max<std::int64_t>(budget / 2, 1);
  std::mt19937_64 init_rng =
      make_engine(config.master_seed, kInitStream + agent_id("dqn"));
  agents::DQNAgent agent(agent_config, init_rng);

  std::mt19937_64 rng =
      make_engine(config.master_seed, kTrainStream + agent_id("dqn"));

  TrainResult result;
  result.model_path = out_dir + "/dqn.nlrl";
  result.log_path = out_dir + "/dqn_train_log.csv";
  EpisodeLogger logger(result.log_path);
  TrainSupervisor sup(config, agent, budget, out_dir + "/dqn",
                      [&](const std::string& p) { agent.save(p); });

  env::PolicyFn explore = [&](const cube::CubeState& s, std::mt19937_64& r) {
    return agent.explore_act(s, agent_config.epsilon.at(result.timesteps), r);
  };

  while (result.timesteps < budget) {
    const env::Trajectory traj =
        env::generate_rollout(explore, agent_config.b, env_config, rng);
    double loss_sum = 0.0;
    int loss_count = 0;
    for (const env::Transition& t : traj.transitions) {
      if (result.timesteps >= budget) break;
      agent.push(t);
      if (agent_config.mirror) agent.push(agents::mirror_transition(t));
      ++result.timesteps;
      if (result.timesteps % agent_config.train_freq == 0) {
        const auto tr = agent.train_step(rng);
        if (tr.trained) {
          loss_sum += tr.loss;
          ++loss_count;
        }
      }
    }
    logger.log(result.episodes, result.timesteps, traj.backward,
               static_cast<int>(traj.transitions.size()),
               !traj.transitions.empty() && traj.transitions.back().is_done,
               loss_count > 0 ? loss_sum / loss_count : 0.0);
    ++result.episodes;
    if (!sup.on_progress(result.timesteps)) break;
  }
  result.early_stopped = sup.stopped_early;
  agent.save(result.model_path);
  return result;
}

TrainResult train_node_lambda(const ExperimentConfig& config,
                              const std::string& out_dir) {
  const std::int64_t budget = effective_timesteps(config, "nodelambda");
  const env::EnvConfig env_config = effective_env(config, "nodelambda");

  agents::NodeLambdaConfig agent_config = config.nodelambda;
  agent_config.epsilon.decay_steps = std::max<std::int64_t>(budget / 2, 1);
  std::mt19937_64 init_rng =
      make_engine(config.master_seed, kInitStream + agent_id("nodelambda"));
  agents::NodeLambda agent(agent_config, init_rng);

  std::mt19937_64 rng =
      make_engine(config.master_seed, kTrainStream + agent_id("nodelambda"));

  TrainResult result;
  result.model_path = out_dir + "/nodelambda.nlrl";
  result.log_path = out_dir + "/nodelambda_train_log.csv";
  EpisodeLogger logger(result.log_path);
  TrainSupervisor sup(config, agent, budget, out_dir + "/nodelambda",
                      [&](const std::string& p) { agent.save(p); });

  std::size_t logged = 0;
  const agents::NodeLambdaTrainLog log = agents::node_lambda_train(
      agent, env_config, budget, rng,
      [&](const agents::NodeLambdaTrainLog& l) {
        for (; logged < l.episodes.size(); ++logged) {
          const auto& ep = l.episodes[logged];
          logger.log(ep.episode, l.timesteps, ep.backward, ep.length,
                     ep.solved, ep.mean_loss_d + ep.mean_loss_ns);
        }
        return sup.on_progress(l.timesteps);
      });

  result.timesteps = log.timesteps;
  result.episodes = static_cast<std::int64_t>(log.episodes.size());
  result.early_stopped = sup.stopped_early;
  agent.save(result.model_path);
  return result;
}

}  // namespace

TrainResult train(const ExperimentConfig& config, const std::string& out_dir) {
  validate(config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  if (config.agent == "tabular") return train_tabular(config, out_dir);
  if (config.agent == "dqn") return train_dqn(config, out_dir);
  if (config.agent == "nodelambda") return train_node_lambda(config, out_dir);
  throw ConfigError("agent '" + config.agent + "' has no training loop");
}

LoadedAgent load_agent(const ExperimentConfig& config,
                       const std::string& model_path) {
  LoadedAgent out;
  if (config.agent == "random") {
    out.eval_policy = [](const cube::CubeState&, std::mt19937_64& rng) {
      return agents::random_act(rng);
    };
    return out;
  }
  if (config.agent == "tabular") {
    out.policy = std::make_unique<agents::TabularQ>(
        agents::TabularQ::load(model_path, config.tabular));
  } else if (config.agent == "dqn") {
    out.policy = std::make_unique<agents::DQNAgent>(
        agents::DQNAgent::load(model_path, config.dqn));
  } else if (config.agent == "nodelambda") {
    out.policy = std::make_unique<agents::NodeLambda>(
        agents::NodeLambda::load(model_path, config.nodelambda));
  } else {
    throw ConfigError("unknown agent '" + config.agent + "'");
  }
  const agents::AgentPolicy* p = out.policy.get();
  out.eval_policy = [p](const cube::CubeState& s, std::mt19937_64&) {
    return p->act(s);
  };
  return out;
}

}  // namespace pocketrl::harness
