#include "pocketrl/agents/node_lambda.hpp"

#include <algorithm>
#include <stdexcept>

#include "pocketrl/errors.hpp"
#include "pocketrl/model_io.hpp"

namespace pocketrl::agents {

namespace {

std::vector<int> ns_dims(const NodeLambdaConfig& config) {
  std::vector<int> dims{cube::kObservationSize};
  dims.insert(dims.end(), config.ns_hidden.begin(), config.ns_hidden.end());
  dims.push_back(cube::kObservationSize);
  return dims;
}

std::vector<int> d_dims(const NodeLambdaConfig& config) {
  std::vector<int> dims{cube::kObservationSize};
  dims.insert(dims.end(), config.d_hidden.begin(), config.d_hidden.end());
  dims.push_back(1);
  return dims;
}

nn::Matrix encode_batch(std::span<const cube::CubeState> states) {
  nn::Matrix x(static_cast<int>(states.size()), cube::kObservationSize);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const cube::Observation obs = cube::encode(states[i]);
    std::copy(obs.begin(), obs.end(),
              x.data.begin() + static_cast<std::ptrdiff_t>(i) * x.cols);
  }
  return x;
}

}  // namespace

NodeLambda::NodeLambda(const NodeLambdaConfig& config,
                       std::mt19937_64& init_rng)
    : config_(config) {
  if (config.lambda < 0) throw std::invalid_argument("lambda must be >= 0");
  if (config.lambda > config.recursion_cap)
    throw std::invalid_argument("lambda exceeds recursion_cap");
  if (config.b < 0.0 || config.b > 1.0)
    throw std::invalid_argument("b must be in [0, 1]");
  theta_d_ = nn::he_init(d_dims(config), init_rng, config.d_output);
  for (int a = 0; a < cube::kNumMoves; ++a)
    theta_ns_[static_cast<std::size_t>(a)] = nn::he_init(ns_dims(config), init_rng);
}

cube::SnapResult NodeLambda::predict_next(cube::Move a,
                                          const cube::CubeState& s) const {
  const cube::Observation obs = cube::encode(s);
  const std::vector<double> logits =
      nn::forward1(theta_ns_[static_cast<std::size_t>(a)], obs);
  cube::SnapResult snapped = cube::snap(logits);
  if (!snapped.valid) ++invalid_snaps_;
  return snapped;
}

double NodeLambda::distance_to_goal(int lambda, const cube::CubeState& s) const {
  auto next = [this](cube::Move a, const cube::CubeState& st) {
    return predict_next(a, st).state;  // invalid snaps still get scored
  };
  auto dist = [this](std::span<const cube::CubeState> states) {
    const nn::Matrix out = nn::forward(theta_d_, encode_batch(states));
    return out.data;
  };
  return distance_to_goal_generic(lambda, s, next, dist);
}

// Same selection rule as act_generic over the network components, but with
// the grandchild expansion evaluated net-major in batches; acting is the
// hottest path during forward rollouts and evaluation.
cube::Move NodeLambda::act(const cube::CubeState& s) const {
  std::array<cube::CubeState, cube::kNumMoves> succ;
  for (int a = 0; a < cube::kNumMoves; ++a) {
    succ[static_cast<std::size_t>(a)] =
        predict_next(static_cast<cube::Move>(a), s).state;
    // a predicted solving move wins outright, lowest ordinal first
    if (cube::is_solved(succ[static_cast<std::size_t>(a)]))
      return static_cast<cube::Move>(a);
  }

  std::array<double, cube::kNumMoves> score{};
  if (std::min(config_.lambda, 1) == 0) {
    // score_a = 1 + theta_D(succ_a); no successor is solved here
    const nn::Matrix d = nn::forward(theta_d_, encode_batch(succ));
    for (int a = 0; a < cube::kNumMoves; ++a)
      score[static_cast<std::size_t>(a)] = 1.0 + d.data[static_cast<std::size_t>(a)];
  } else {
    // one batched forward per next-state network over all 12 parents
    const nn::Matrix parents = encode_batch(succ);
    std::vector<cube::CubeState> grand(144);  // [a * 12 + b]
    for (int b = 0; b < cube::kNumMoves; ++b) {
      const nn::Matrix out =
          nn::forward(theta_ns_[static_cast<std::size_t>(b)], parents);
      for (int a = 0; a < cube::kNumMoves; ++a) {
        const cube::SnapResult snapped = cube::snap(std::span<const double>(
            out.data.data() + static_cast<std::ptrdiff_t>(a) * 144, 144));
        if (!snapped.valid) ++invalid_snaps_;
        grand[static_cast<std::size_t>(a * 12 + b)] = snapped.state;
      }
    }
    // theta_D over the 144 grandchildren, chunked to keep buffers small
    std::array<double, 144> gd{};
    for (int chunk = 0; chunk < 3; ++chunk) {
      const std::span<const cube::CubeState> part(grand.data() + chunk * 48, 48);
      const nn::Matrix d = nn::forward(theta_d_, encode_batch(part));
      std::copy(d.data.begin(), d.data.end(), gd.begin() + chunk * 48);
    }
    for (int a = 0; a < cube::kNumMoves; ++a) {
      int best_b = 0;
      for (int b = 1; b < cube::kNumMoves; ++b)
        if (gd[static_cast<std::size_t>(a * 12 + b)] <
            gd[static_cast<std::size_t>(a * 12 + best_b)])
          best_b = b;
      const cube::CubeState& gmin =
          grand[static_cast<std::size_t>(a * 12 + best_b)];
      // 1 + DistanceToGoal(1, succ_a) = 2 + DistanceToGoal(0, gmin)
      score[static_cast<std::size_t>(a)] =
          2.0 + (cube::is_solved(gmin)
                     ? 0.0
                     : gd[static_cast<std::size_t>(a * 12 + best_b)]);
    }
  }

  int best = 0;
  for (int a = 1; a < cube::kNumMoves; ++a)
    if (score[static_cast<std::size_t>(a)] < score[static_cast<std::size_t>(best)])
      best = a;
  return static_cast<cube::Move>(best);
}

void NodeLambda::save(const std::string& path) const {
  nn::ModelFile file;
  file.networks.reserve(1 + cube::kNumMoves);
  file.networks.push_back(theta_d_);
  for (const nn::MLP& net : theta_ns_) file.networks.push_back(net);
  nn::save_model(path, file);
}

NodeLambda NodeLambda::load(const std::string& path,
                            const NodeLambdaConfig& config) {
  nn::ModelFile file = nn::load_model(path);
  if (file.networks.size() != 1 + cube::kNumMoves)
    throw IoError("node-lambda model file must hold 13 networks: " + path);
  std::mt19937_64 dummy(0);
  NodeLambda agent(config, dummy);
  agent.theta_d_ = std::move(file.networks[0]);
  agent.theta_d_.output_activation = config.d_output;
  for (int a = 0; a < cube::kNumMoves; ++a) {
    agent.theta_ns_[static_cast<std::size_t>(a)] =
        std::move(file.networks[static_cast<std::size_t>(a) + 1]);
    agent.theta_ns_[static_cast<std::size_t>(a)].output_activation =
        nn::OutputActivation::Identity;
  }
  return agent;
}

// ---------------------------------------------------------------------------

struct NodeLambdaTrainer {
  NodeLambda& agent;
  nn::AdamState adam_d;
  std::array<nn::AdamState, cube::kNumMoves> adam_ns;
  // Reused buffers; gradient matrices are large enough that reallocating
  // them per transition dominates the update cost.
  nn::Gradients grads_d;
  std::array<nn::Gradients, cube::kNumMoves> grads_ns;
  nn::BackwardScratch scratch;
  nn::ForwardCache cache;
  nn::Matrix x{1, cube::kObservationSize};
  nn::Matrix ns_target{1, cube::kObservationSize};
  nn::Matrix d_target_mat{1, 1};

  explicit NodeLambdaTrainer(NodeLambda& a)
      : agent(a), adam_d(nn::make_adam(a.theta_d_, {.lr = a.config_.lr})) {
    for (int m = 0; m < cube::kNumMoves; ++m)
      adam_ns[static_cast<std::size_t>(m)] =
          nn::make_adam(a.theta_ns_[static_cast<std::size_t>(m)],
                        {.lr = a.config_.lr});
  }

  void load_input(const cube::CubeState& s) {
    const cube::Observation obs = cube::encode(s);
    std::copy(obs.begin(), obs.end(), x.data.begin());
  }

  double update_next_state(const env::Transition& t) {
    nn::MLP& net = agent.theta_ns_[static_cast<std::size_t>(t.a)];
    load_input(t.s);
    nn::forward(net, x, &cache);

    const cube::Observation target_obs = cube::encode(t.s_next);
    std::copy(target_obs.begin(), target_obs.end(), ns_target.data.begin());

    const double loss = nn::backward_into(
        net, cache, nn::LossSpec::grouped_ce(), ns_target,
        grads_ns[static_cast<std::size_t>(t.a)], scratch);
    nn::adam_step(net, grads_ns[static_cast<std::size_t>(t.a)],
                  adam_ns[static_cast<std::size_t>(t.a)]);
    return loss;
  }

  double update_distance(const env::Transition& t, double d_target) {
    load_input(t.s);
    nn::forward(agent.theta_d_, x, &cache);
    d_target_mat.data[0] = d_target;
    const double loss =
        nn::backward_into(agent.theta_d_, cache, nn::LossSpec::huber(1.0),
                          d_target_mat, grads_d, scratch);
    nn::adam_step(agent.theta_d_, grads_d, adam_d);
    return loss;
  }
};

NodeLambdaTrainLog node_lambda_train(NodeLambda& agent,
                                     const env::EnvConfig& env_config,
                                     std::int64_t max_timesteps,
                                     std::mt19937_64& rng,
                                     const EpisodeCallback& on_episode) {
  env::validate(env_config);
  NodeLambdaTrainLog log;
  NodeLambdaTrainer trainer(agent);
  const NodeLambdaConfig& config = agent.config();

  env::PolicyFn explore = [&](const cube::CubeState& s, std::mt19937_64& r) {
    return agent.explore_act(s, config.epsilon.at(log.timesteps), r);
  };

  // Optional warmup phase for the transition model alone.
  std::int64_t pretrain_left = config.pretrain_ns_steps;
  while (pretrain_left > 0 && log.timesteps < max_timesteps) {
    const env::Trajectory traj =
        env::generate_rollout(explore, config.b, env_config, rng);
    for (auto it = traj.transitions.rbegin(); it != traj.transitions.rend();
         ++it) {
      trainer.update_next_state(*it);
      ++log.timesteps;
      --pretrain_left;
      if (pretrain_left <= 0 || log.timesteps >= max_timesteps) break;
    }
  }

  for (std::int64_t episode = 0;
       episode < config.max_episodes && log.timesteps < max_timesteps;
       ++episode) {
    const env::Trajectory traj =
        env::generate_rollout(explore, config.b, env_config, rng);

    NodeLambdaTrainLog::Episode ep;
    ep.episode = episode;
    ep.length = static_cast<int>(traj.transitions.size());
    ep.solved =
        !traj.transitions.empty() && traj.transitions.back().is_done;
    ep.backward = traj.backward;

    double sum_ns = 0.0;
    double sum_d = 0.0;
    // Alg-order: consume the trajectory in reverse, goal-side first. The
    // distance target is fixed before this transition's updates touch the
    // networks it bootstraps through.
    for (int i = ep.length - 1; i >= 0; --i) {
      const env::Transition& t =
          traj.transitions[static_cast<std::size_t>(i)];
      log.consumed.emplace_back(episode, i);
      const double d_target =
          t.is_done
              ? 1.0
              : 1.0 + agent.distance_to_goal(config.lambda, t.s_next);
      sum_ns += trainer.update_next_state(t);
      sum_d += trainer.update_distance(t, d_target);
      ++log.timesteps;
    }
    if (ep.length > 0) {
      ep.mean_loss_ns = sum_ns / ep.length;
      ep.mean_loss_d = sum_d / ep.length;
    }
    log.episodes.push_back(ep);
    if (on_episode && !on_episode(log)) break;
  }
  return log;
}

}  // namespace pocketrl::agents
