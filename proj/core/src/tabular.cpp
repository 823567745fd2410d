#include "pocketrl/agents/tabular.hpp"

#include <algorithm>

#include "pocketrl/model_io.hpp"
#include "pocketrl/rng.hpp"

namespace pocketrl::agents {

namespace {

using Row = std::array<double, cube::kNumMoves>;

// Left-right reflection: position map (an involution), L/R color swap, and
// the handedness flip on moves (U -> U', L -> R', ...). Verified against the
// move tables by the mirror unit tests.
constexpr std::array<std::uint8_t, 24> kMirrorSrc = {
    1, 0, 3, 2, 5, 4, 7, 6, 9, 8, 11, 10,
    13, 12, 15, 14, 21, 20, 23, 22, 17, 16, 19, 18};
constexpr std::array<std::uint8_t, 24> kMirrorMove = {1, 0, 3, 2, 5, 4,
                                                      7, 6, 11, 10, 9, 8};

cube::CubeState reflect(const cube::CubeState& s) {
  cube::CubeState out{};
  for (int j = 0; j < cube::kNumStickers; ++j) {
    cube::Color c = s.stickers[kMirrorSrc[j]];
    if (c == cube::Color::CL) c = cube::Color::CR;
    else if (c == cube::Color::CR) c = cube::Color::CL;
    out.stickers[j] = c;
  }
  return out;
}

}  // namespace

env::Transition mirror_transition(const env::Transition& t) {
  env::Transition out;
  out.s = reflect(t.s);
  out.a = static_cast<cube::Move>(kMirrorMove[static_cast<int>(t.a)]);
  out.s_next = reflect(t.s_next);
  out.reward = t.reward;    // the reflection fixes the goal set
  out.is_done = t.is_done;
  return out;
}

cube::Move TabularQ::act(const cube::CubeState& s) const {
  const cube::CanonicalResult cf = cube::canonical_form(s);
  const std::uint32_t idx = cube::rank(cf.state).value;

  Row row{};
  if (auto it = q_.find(idx); it != q_.end()) row = it->second;

  const double best = *std::max_element(row.begin(), row.end());
  int pick;
  if (best > 0.0) {
    std::array<int, cube::kNumMoves> ties{};
    int n_ties = 0;
    for (int a = 0; a < cube::kNumMoves; ++a)
      if (row[a] == best) ties[n_ties++] = a;
    pick = ties[mix64(idx) % static_cast<std::uint64_t>(n_ties)];
  } else {
    // Nothing learned here: walk by a fixed hash of the state, clockwise
    // turns only. A clockwise move is never undone by the next state's
    // clockwise pick, so the walk cannot fall into a two-state bounce and
    // keeps exploring until it reaches learned territory.
    pick = 2 * static_cast<int>(mix64(idx) % 6);
  }
  return cube::rotate_move(cube::inverse_rotation(cf.rotation),
                           static_cast<cube::Move>(pick));
}

double TabularQ::q_value(const cube::CubeState& s, cube::Move a) const {
  const cube::CanonicalResult cf = cube::canonical_form(s);
  const auto it = q_.find(cube::rank(cf.state).value);
  if (it == q_.end()) return 0.0;
  return it->second[static_cast<int>(cube::rotate_move(cf.rotation, a))];
}

void tabular_update(TabularQ& agent, const env::Transition& t) {
  const cube::CanonicalResult cf = cube::canonical_form(t.s);
  const std::uint32_t idx = cube::rank(cf.state).value;
  const int a_c = static_cast<int>(cube::rotate_move(cf.rotation, t.a));

  double bootstrap = 0.0;
  if (!t.is_done) {
    const std::uint32_t next_idx =
        cube::rank(cube::canonicalize(t.s_next)).value;
    if (auto it = agent.q_.find(next_idx); it != agent.q_.end())
      bootstrap = *std::max_element(it->second.begin(), it->second.end());
  }

  Row& row = agent.q_[idx];
  const double target = t.reward + agent.config_.gamma * bootstrap;
  row[a_c] += agent.config_.alpha * (target - row[a_c]);
}

void TabularQ::save(const std::string& path) const {
  nn::ModelFile file;
  file.table.reserve(q_.size());
  for (const auto& [idx, row] : q_) {
    nn::TableRecord rec;
    rec.index = idx;
    for (int a = 0; a < cube::kNumMoves; ++a)
      rec.values[a] = static_cast<float>(row[a]);
    file.table.push_back(rec);
  }
  std::sort(file.table.begin(), file.table.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  nn::save_model(path, file);
}

TabularQ TabularQ::load(const std::string& path, TabularConfig config) {
  const nn::ModelFile file = nn::load_model(path);
  TabularQ agent(config);
  agent.q_.reserve(file.table.size());
  for (const nn::TableRecord& rec : file.table) {
    Row row{};
    for (int a = 0; a < cube::kNumMoves; ++a)
      row[a] = static_cast<double>(rec.values[a]);
    agent.q_[rec.index] = row;
  }
  return agent;
}

}  // namespace pocketrl::agents
