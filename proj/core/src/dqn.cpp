#include "pocketrl/agents/dqn.hpp"

#include <algorithm>

#include "pocketrl/errors.hpp"
#include "pocketrl/model_io.hpp"

namespace pocketrl::agents {

namespace {

std::vector<int> full_dims(const DQNConfig& config) {
  std::vector<int> dims{cube::kObservationSize};
  dims.insert(dims.end(), config.hidden.begin(), config.hidden.end());
  dims.push_back(cube::kNumMoves);
  return dims;
}

}  // namespace

DQNAgent::DQNAgent(const DQNConfig& config, std::mt19937_64& init_rng)
    : config_(config),
      online_(nn::he_init(full_dims(config), init_rng)),
      target_(online_),
      adam_(nn::make_adam(online_, {.lr = config.lr})) {
  replay_.reserve(static_cast<std::size_t>(config.replay_capacity));
}

cube::Move DQNAgent::act(const cube::CubeState& s) const {
  const cube::Observation obs = cube::encode(s);
  const std::vector<double> q = nn::forward1(online_, obs);
  int best = 0;
  for (int a = 1; a < cube::kNumMoves; ++a)
    if (q[a] > q[best]) best = a;
  return static_cast<cube::Move>(best);
}

void DQNAgent::push(const env::Transition& t) {
  if (replay_.size() < static_cast<std::size_t>(config_.replay_capacity)) {
    replay_.push_back(t);
  } else {
    replay_[replay_next_] = t;  // evict oldest
  }
  replay_next_ = (replay_next_ + 1) % static_cast<std::size_t>(config_.replay_capacity);
}

DQNAgent::TrainResult DQNAgent::train_step(std::mt19937_64& rng) {
  const std::size_t need = static_cast<std::size_t>(
      std::max(config_.batch_size, config_.warmup));
  if (replay_.size() < need) return {};

  const int batch = config_.batch_size;
  x_.resize(batch, cube::kObservationSize);
  x_next_.resize(batch, cube::kObservationSize);
  std::vector<int> action(static_cast<std::size_t>(batch));
  std::vector<double> reward(static_cast<std::size_t>(batch));
  std::vector<bool> done(static_cast<std::size_t>(batch));

  std::uniform_int_distribution<std::size_t> pick(0, replay_.size() - 1);
  for (int i = 0; i < batch; ++i) {
    const env::Transition& t = replay_[pick(rng)];
    const cube::Observation obs = cube::encode(t.s);
    const cube::Observation obs_next = cube::encode(t.s_next);
    std::copy(obs.begin(), obs.end(),
              x_.data.begin() + static_cast<std::ptrdiff_t>(i) * x_.cols);
    std::copy(obs_next.begin(), obs_next.end(),
              x_next_.data.begin() +
                  static_cast<std::ptrdiff_t>(i) * x_next_.cols);
    action[static_cast<std::size_t>(i)] = static_cast<int>(t.a);
    reward[static_cast<std::size_t>(i)] = t.reward;
    done[static_cast<std::size_t>(i)] = t.is_done;
  }

  const nn::Matrix pred = nn::forward(online_, x_, &cache_);
  const nn::Matrix next_q = nn::forward(target_, x_next_);

  // Regress the taken-action values only: the target matrix equals the
  // prediction everywhere else, so those entries contribute no gradient.
  target_mat_ = pred;
  for (int i = 0; i < batch; ++i) {
    double best = next_q.at(i, 0);
    for (int a = 1; a < cube::kNumMoves; ++a)
      best = std::max(best, next_q.at(i, a));
    const std::size_t idx = static_cast<std::size_t>(i);
    const double y =
        reward[idx] + (done[idx] ? 0.0 : config_.gamma * best);
    target_mat_.at(i, action[idx]) = y;
  }

  const double loss = nn::backward_into(online_, cache_, nn::LossSpec::mse(),
                                        target_mat_, grads_, scratch_);
  nn::adam_step(online_, grads_, adam_);

  ++train_calls_;
  if (train_calls_ % config_.sync_period == 0) target_ = online_;
  return {true, loss};
}

void DQNAgent::save(const std::string& path) const {
  nn::ModelFile file;
  file.networks.push_back(online_);
  nn::save_model(path, file);
}

DQNAgent DQNAgent::load(const std::string& path, const DQNConfig& config) {
  const nn::ModelFile file = nn::load_model(path);
  if (file.networks.size() != 1)
    throw IoError("DQN model file must hold exactly one network: " + path);
  std::mt19937_64 dummy(0);
  DQNAgent agent(config, dummy);
  agent.online_ = file.networks[0];
  agent.target_ = agent.online_;
  agent.adam_ = nn::make_adam(agent.online_, {.lr = config.lr});
  return agent;
}

}  // namespace pocketrl::agents
