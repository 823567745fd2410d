// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Artifacts (oracle file, trained models, CSVs) land in argv[1].

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>
#include <vector>

#include "pocketrl/agents/node_lambda.hpp"
#include "pocketrl/agents/tabular.hpp"
#include "pocketrl/gradcheck.hpp"
#include "pocketrl/harness/bench.hpp"
#include "pocketrl/harness/report.hpp"
#include "pocketrl/harness/train.hpp"
#include "pocketrl/oracle.hpp"
#include "pocketrl/rng.hpp"

using namespace pocketrl;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL",
              criterion, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

long vm_hwm_mib() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      long kb = 0;
      std::sscanf(line.c_str(), "VmHWM: %ld kB", &kb);
      return kb / 1024;
    }
  }
  return -1;
}

cube::CubeState random_walk_state(std::mt19937_64& rng, int len = 30) {
  return cube::scramble(len, rng).state;
}

// ---------------------------------------------------------------------------

bool criterion1_group_laws() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  long checks = 0;
  bool ok = true;

  for (int i = 0; i < 1000 && ok; ++i) {
    const cube::CubeState s = random_walk_state(rng);
    for (int m = 0; m < cube::kNumMoves; ++m) {
      const cube::Move mv = static_cast<cube::Move>(m);
      // inverse round-trip
      ok &= cube::apply_move(cube::apply_move(s, mv), cube::inverse(mv)) == s;
      // order 4
      cube::CubeState t = s;
      for (int k = 0; k < 4; ++k) t = cube::apply_move(t, mv);
      ok &= t == s;
      // color-count conservation
      const cube::CubeState u = cube::apply_move(s, mv);
      for (int c = 0; c < cube::kNumColors; ++c)
        ok &= std::count(u.stickers.begin(), u.stickers.end(),
                         static_cast<cube::Color>(c)) == 4;
      checks += 3;
    }
    // opposite faces commute
    using cube::Move;
    const Move pairs[3][2] = {
        {Move::U, Move::D}, {Move::F, Move::B}, {Move::L, Move::R}};
    for (const auto& p : pairs) {
      ok &= cube::apply_move(cube::apply_move(s, p[0]), p[1]) ==
            cube::apply_move(cube::apply_move(s, p[1]), p[0]);
      ++checks;
    }
  }
  // adjacent faces do not commute (witness)
  const cube::CubeState w = cube::solved();
  ok &= cube::apply_move(cube::apply_move(w, cube::Move::F), cube::Move::U) !=
        cube::apply_move(cube::apply_move(w, cube::Move::U), cube::Move::F);

  const double secs = seconds_since(t0);
  ok &= secs < 10.0;
  char detail[128];
  std::snprintf(detail, sizeof detail, "%ld checks in %.1f s", checks, secs);
  report(1, ok, "group laws over 12 moves x 1000 random states", detail);
  return ok;
}

oracle::DistanceTable criterion2_state_space(const std::string& out_dir) {
  const auto t0 = Clock::now();
  oracle::DistanceTable table = oracle::DistanceTable::build();
  const double build_secs = seconds_since(t0);

  std::uint64_t assigned = 0;
  for (std::uint8_t d : table.raw())
    if (d != oracle::kUnvisited) ++assigned;

  bool bijection = true;
  for (std::uint32_t i = 0; i < cube::kStateCount; ++i) {
    if (cube::rank(cube::unrank(cube::CanonicalIndex{i})).value != i) {
      bijection = false;
      break;
    }
  }

  const long hwm = vm_hwm_mib();
  const bool ok = assigned == cube::kStateCount && bijection &&
                  table.max_distance() == 14 && build_secs < 300.0 &&
                  hwm > 0 && hwm < 512;
  char detail[160];
  std::snprintf(detail, sizeof detail,
                "%llu states, max distance %d, build %.1f s, peak rss %ld MiB",
                static_cast<unsigned long long>(assigned),
                table.max_distance(), build_secs, hwm);
  report(2, ok, "canonical enumeration 7!*3^6 and full-range rank/unrank",
         detail);

  table.save(out_dir + "/oracle.nlor");
  return table;
}

// Depth-limited DFS over raw move sequences; counts canonical states first
// reachable at each depth. Independent of the BFS in oracle::build.
void dfs_reach(const cube::CubeState& s, int depth_left,
               std::unordered_set<std::uint32_t>& reached) {
  reached.insert(cube::rank(cube::canonicalize(s)).value);
  if (depth_left == 0) return;
  for (int m = 0; m < cube::kNumMoves; ++m)
    dfs_reach(cube::apply_move(s, static_cast<cube::Move>(m)), depth_left - 1,
              reached);
}

bool criterion3_oracle_consistency(const oracle::DistanceTable& table) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(103);
  std::uniform_int_distribution<std::uint32_t> pick(0, cube::kStateCount - 1);

  bool lipschitz = true;
  for (int i = 0; i < 100000; ++i) {
    const cube::CubeState s = cube::unrank(cube::CanonicalIndex{pick(rng)});
    const int d = oracle::optimal_distance(table, s);
    const cube::Move m = static_cast<cube::Move>(
        std::uniform_int_distribution<int>(0, 11)(rng));
    const int dn = oracle::optimal_distance(table, cube::apply_move(s, m));
    if (std::abs(d - dn) > 1) {
      lipschitz = false;
      break;
    }
  }

  bool descent = true;
  for (int i = 0; i < 100000; ++i) {
    cube::CubeState s = cube::unrank(cube::CanonicalIndex{pick(rng)});
    if (cube::is_solved(s)) continue;
    const int d = oracle::optimal_distance(table, s);
    bool has_decreasing = false;
    for (int m = 0; m < cube::kNumMoves && !has_decreasing; ++m)
      has_decreasing = oracle::optimal_distance(
                           table, cube::apply_move(
                                      s, static_cast<cube::Move>(m))) == d - 1;
    if (!has_decreasing) {
      descent = false;
      break;
    }
  }

  // independent depth-limited DFS, exact histogram match for depths 0..5
  bool hist_ok = true;
  const auto hist = table.histogram();
  std::unordered_set<std::uint32_t> reached;
  std::uint64_t prev = 0;
  for (int d = 0; d <= 5; ++d) {
    reached.clear();
    dfs_reach(cube::solved(), d, reached);
    const std::uint64_t at_depth = reached.size() - prev;
    prev = reached.size();
    hist_ok &= at_depth == hist[static_cast<std::size_t>(d)];
  }

  const bool ok = lipschitz && descent && hist_ok;
  char detail[160];
  std::snprintf(detail, sizeof detail,
                "lipschitz %s, descent %s, dfs histogram %s, %.1f s",
                lipschitz ? "ok" : "VIOLATED", descent ? "ok" : "VIOLATED",
                hist_ok ? "ok" : "MISMATCH", seconds_since(t0));
  report(3, ok, "oracle self-consistency on 100k samples + depth-5 DFS",
         detail);
  return ok;
}

bool criterion4_gradients() {
  const auto t0 = Clock::now();
  const nn::GradcheckReport gc = nn::gradcheck(50, 104);
  const double secs = seconds_since(t0);
  const bool ok = gc.failures == 0 && gc.trials == 50 && secs < 60.0;
  char detail[128];
  std::snprintf(detail, sizeof detail,
                "%d/%d architectures, worst rel error %.2e, %.1f s",
                gc.trials - gc.failures, gc.trials, gc.worst_rel_error, secs);
  report(4, ok, "analytic vs central-difference gradients", detail);
  return ok;
}

bool criterion5_next_state_learnability() {
  const auto t0 = Clock::now();
  const int kTrain = 200000;
  const int kHeld = 10000;
  const int kBatch = 64;

  // uniform canonical states in a uniformly random whole-cube orientation
  auto sample_state = [](std::mt19937_64& rng) {
    std::uniform_int_distribution<std::uint32_t> pick(0, cube::kStateCount - 1);
    const cube::CubeState s = cube::unrank(cube::CanonicalIndex{pick(rng)});
    return cube::apply_rotation(
        s, std::uniform_int_distribution<int>(0, 23)(rng));
  };

  double worst_acc = 1.0;
  for (int move = 0; move < cube::kNumMoves; ++move) {
    const cube::Move mv = static_cast<cube::Move>(move);
    std::mt19937_64 init(500 + move);
    nn::MLP net = nn::he_init({144, 256, 144}, init);
    nn::AdamState adam = nn::make_adam(net, {.lr = 1e-3});
    nn::Gradients grads;
    nn::BackwardScratch scratch;
    nn::ForwardCache cache;

    std::mt19937_64 rng(600 + move);
    nn::Matrix x(kBatch, 144);
    nn::Matrix target(kBatch, 144);
    for (int step = 0; step < kTrain / kBatch; ++step) {
      for (int i = 0; i < kBatch; ++i) {
        const cube::CubeState s = sample_state(rng);
        const cube::Observation in = cube::encode(s);
        const cube::Observation out = cube::encode(cube::apply_move(s, mv));
        std::copy(in.begin(), in.end(), x.data.begin() + i * 144);
        std::copy(out.begin(), out.end(), target.data.begin() + i * 144);
      }
      nn::forward(net, x, &cache);
      nn::backward_into(net, cache, nn::LossSpec::grouped_ce(), target, grads,
                        scratch);
      nn::adam_step(net, grads, adam);
    }

    // held-out exact snapped-state accuracy, disjoint seed stream
    std::mt19937_64 held(700 + move);
    int exact = 0;
    for (int i = 0; i < kHeld; ++i) {
      const cube::CubeState s = sample_state(held);
      const std::vector<double> logits = nn::forward1(net, cube::encode(s));
      if (cube::snap(logits).state == cube::apply_move(s, mv)) ++exact;
    }
    worst_acc = std::min(worst_acc, static_cast<double>(exact) / kHeld);
  }

  const double secs = seconds_since(t0);
  const bool ok = worst_acc >= 0.99 && secs < 1800.0;
  char detail[128];
  std::snprintf(detail, sizeof detail,
                "worst per-move exact accuracy %.4f, %.0f s total", worst_acc,
                secs);
  report(5, ok, "12 next-state networks, 200k pairs each, 10k held out",
         detail);
  return ok;
}

double spearman(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = a.size();
  auto to_ranks = [](std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg =
          (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    v = r;
  };
  to_ranks(a);
  to_ranks(b);
  const double mean = (static_cast<double>(n) + 1.0) / 2.0;
  double cov = 0.0;
  double va = 0.0;
  double vb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (a[i] - mean) * (b[i] - mean);
    va += (a[i] - mean) * (a[i] - mean);
    vb += (b[i] - mean) * (b[i] - mean);
  }
  return cov / std::sqrt(va * vb);
}

// Trains the default Node(lambda) configuration (lambda=1, b=0.9, 500k
// steps, depth <= 10 curriculum) and checks theta_D against the oracle.
// Returns the model path for reuse in criterion 8.
std::string criterion6_distance_fidelity(const oracle::DistanceTable& table,
                                         const std::string& out_dir) {
  const auto t0 = Clock::now();
  harness::ExperimentConfig config = harness::default_config();
  config.agent = "nodelambda";
  config.master_seed = 1;
  // pinned run: lambda=1, b=0.9, 500k steps, depth <= 10
  config.nodelambda.lambda = 1;
  config.nodelambda.b = 0.9;
  config.nodelambda_over = {500000, 1, 10};

  const harness::TrainResult tr = harness::train(config, out_dir);
  const harness::LoadedAgent loaded =
      harness::load_agent(config, tr.model_path);
  const auto* agent =
      dynamic_cast<const agents::NodeLambda*>(loaded.policy.get());

  std::mt19937_64 rng(106);
  std::vector<double> predicted;
  std::vector<double> actual;
  for (int i = 0; i < 10000; ++i) {
    const int depth = std::uniform_int_distribution<int>(1, 10)(rng);
    const cube::CubeState s = cube::scramble(depth, rng).state;
    predicted.push_back(agent->distance_to_goal(0, s));
    actual.push_back(oracle::optimal_distance(table, s));
  }
  const double rho = spearman(predicted, actual);

  const bool ok = rho >= 0.8;
  char detail[160];
  std::snprintf(detail, sizeof detail,
                "spearman %.3f over 10k states of depth <= 10, train %.0f s",
                rho, seconds_since(t0));
  report(6, ok, "distance network vs oracle after the 500k-step run", detail);
  return tr.model_path;
}

std::string criterion7_tabular(const oracle::DistanceTable& table,
                               const std::string& out_dir) {
  const auto t0 = Clock::now();

  // part 1: exhaustive backward-rollout training restricted to depth <= 5
  harness::ExperimentConfig small = harness::default_config();
  small.agent = "tabular";
  small.master_seed = 1;
  small.tabular.b = 1.0;
  small.tabular_over = {400000, 1, 5};
  const harness::TrainResult small_tr =
      harness::train(small, out_dir + "/tab5");
  const agents::TabularQ small_agent =
      agents::TabularQ::load(small_tr.model_path, small.tabular);

  int optimal = 0;
  int states = 0;
  std::mt19937_64 rot_rng(107);
  for (std::uint32_t i = 0; i < cube::kStateCount; ++i) {
    const int d = table.at(cube::CanonicalIndex{i});
    if (d < 1 || d > 5) continue;
    ++states;
    // exercise an arbitrary whole-cube orientation of every such state
    cube::CubeState s = cube::apply_rotation(
        cube::unrank(cube::CanonicalIndex{i}),
        std::uniform_int_distribution<int>(0, 23)(rot_rng));
    int steps = 0;
    while (!cube::is_solved(s) && steps <= d) {
      s = cube::apply_move(s, small_agent.act(s));
      ++steps;
    }
    if (cube::is_solved(s) && steps == d) ++optimal;
  }
  const bool part1 = optimal == states && states == 2943;

  // part 2: 1M-step run on depth <= 14, standard 1,000-cube evaluation
  harness::ExperimentConfig full = harness::default_config();
  full.agent = "tabular";
  full.master_seed = 1;
  const harness::TrainResult full_tr = harness::train(full, out_dir);
  const harness::LoadedAgent loaded =
      harness::load_agent(full, full_tr.model_path);
  const harness::EvalReport eval = harness::evaluate(
      loaded.eval_policy, full.eval, table, full.master_seed);
  const bool part2 = eval.solved_count >= 950 && eval.total == 1000 &&
                     full_tr.timesteps == 1'000'000;

  const bool ok = part1 && part2;
  char detail[200];
  std::snprintf(detail, sizeof detail,
                "depth<=5 optimal %d/%d; 1M-step eval %d/1000 solved; %.0f s",
                optimal, states, eval.solved_count, seconds_since(t0));
  report(7, ok, "tabular optimality at small depth + 1M-step solve rate",
         detail);
  return full_tr.model_path;
}

bool criterion8_ordering(const oracle::DistanceTable& table,
                         const std::string& out_dir,
                         const std::string& tabular_model,
                         const std::string& nodelambda_model) {
  const auto t0 = Clock::now();
  harness::ExperimentConfig config = harness::default_config();
  config.master_seed = 1;

  auto eval_agent = [&](const std::string& agent, const std::string& model,
                        std::int64_t* budget) {
    harness::ExperimentConfig c = config;
    c.agent = agent;
    std::string path = model;
    if (agent == "dqn") {
      const harness::TrainResult tr = harness::train(c, out_dir);
      path = tr.model_path;
      *budget = tr.timesteps;
    } else if (agent == "random") {
      *budget = 0;
    } else {
      *budget = harness::effective_timesteps(c, agent);
    }
    const harness::LoadedAgent loaded = harness::load_agent(c, path);
    return harness::evaluate(loaded.eval_policy, c.eval, table,
                             c.master_seed);
  };

  std::int64_t b_rand = 0;
  std::int64_t b_tab = 0;
  std::int64_t b_dqn = 0;
  std::int64_t b_nl = 0;
  const harness::EvalReport random_r = eval_agent("random", "", &b_rand);
  const harness::EvalReport tabular_r =
      eval_agent("tabular", tabular_model, &b_tab);
  const harness::EvalReport dqn_r = eval_agent("dqn", "", &b_dqn);
  const harness::EvalReport nl_r =
      eval_agent("nodelambda", nodelambda_model, &b_nl);

  const bool ordering = tabular_r.solved_count >= dqn_r.solved_count &&
                        dqn_r.solved_count >= nl_r.solved_count &&
                        nl_r.solved_count >= 3 * random_r.solved_count;
  auto in_budget = [](std::int64_t b) {
    return b >= 100'000 && b <= 1'000'000;
  };
  const bool budgets = in_budget(b_tab) && in_budget(b_dqn) && in_budget(b_nl);

  const bool ok = ordering && budgets;
  char detail[200];
  std::snprintf(
      detail, sizeof detail,
      "tabular %d >= dqn %d >= nodelambda %d >= 3x random %d; %.0f s",
      tabular_r.solved_count, dqn_r.solved_count, nl_r.solved_count,
      3 * random_r.solved_count, seconds_since(t0));
  report(8, ok, "agent ordering under the shared 1,000-cube evaluation",
         detail);
  return ok;
}

// Reads a bench CSV and drops the trailing wall_time column of every line;
// wall time is the one field the master seed cannot determine.
std::string csv_without_walltime(const std::string& path) {
  std::ifstream in(path);
  std::stringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t cut = line.rfind(',');
    out << line.substr(0, cut) << '\n';
  }
  return out.str();
}

bool criterion9_determinism(const oracle::DistanceTable& table,
                            const std::string& out_dir) {
  const auto t0 = Clock::now();
  harness::ExperimentConfig config = harness::default_config();
  config.master_seed = 17;
  config.total_timesteps = 2000;
  config.tabular_over.timesteps = 0;  // inherit the small budget everywhere
  config.dqn_over.timesteps = 0;
  config.nodelambda_over.timesteps = 0;
  config.dqn.warmup = 200;
  config.eval.cubes = 50;

  std::string csv1;
  std::string csv2;
  const char* cli = std::getenv("POCKETRL_CLI");
  if (cli != nullptr && *cli != '\0') {
    // end-to-end through the command line
    const std::string oracle_path = out_dir + "/oracle.nlor";
    const std::string cfg_path = out_dir + "/bench_config.json";
    std::ofstream(cfg_path) << harness::to_json(config);
    for (const char* run : {"bench1", "bench2"}) {
      const std::string cmd = std::string(cli) + " bench --config " +
                              cfg_path + " --oracle " + oracle_path +
                              " --out " + out_dir + "/" + run +
                              " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) {
        report(9, false, "bench determinism", "bench CLI run failed");
        return false;
      }
    }
  } else {
    harness::bench(config, table, out_dir + "/bench1");
    harness::bench(config, table, out_dir + "/bench2");
  }
  csv1 = csv_without_walltime(out_dir + "/bench1/bench.csv");
  csv2 = csv_without_walltime(out_dir + "/bench2/bench.csv");

  const bool ok = !csv1.empty() && csv1 == csv2;
  char detail[128];
  std::snprintf(detail, sizeof detail,
                "%zu CSV bytes compared (wall_time column excluded), %.0f s",
                csv1.size(), seconds_since(t0));
  report(9, ok, "repeated bench is byte-identical under one master seed",
         detail);
  return ok;
}

bool criterion10_backward_validity() {
  const auto t0 = Clock::now();
  env::EnvConfig config;
  config.scramble_depth_min = 1;
  config.scramble_depth_max = 14;
  std::mt19937_64 rng(110);
  const env::PolicyFn policy = [](const cube::CubeState&,
                                  std::mt19937_64& r) {
    return agents::random_act(r);
  };

  bool ok = true;
  for (int i = 0; i < 10000 && ok; ++i) {
    const env::Trajectory traj =
        env::generate_rollout(policy, 1.0, config, rng);
    ok &= !traj.transitions.empty();
    ok &= traj.transitions.back().is_done;
    for (std::size_t k = 0; k < traj.transitions.size(); ++k) {
      const env::Transition& t = traj.transitions[k];
      ok &= t.s_next == cube::apply_move(t.s, t.a);
      ok &= t.is_done == cube::is_solved(t.s_next);
      if (k + 1 < traj.transitions.size()) {
        ok &= t.s_next == traj.transitions[k + 1].s;
        ok &= !t.is_done;
      }
    }
    cube::CubeState s = traj.transitions.front().s;
    for (const env::Transition& t : traj.transitions)
      s = cube::apply_move(s, t.a);
    ok &= cube::is_solved(s);
  }
  char detail[96];
  std::snprintf(detail, sizeof detail, "10k trajectories, %.1f s",
                seconds_since(t0));
  report(10, ok, "backward rollouts replay to the goal", detail);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string out_dir = argc > 1 ? argv[1] : "acceptance_out";
  std::filesystem::create_directories(out_dir);

  criterion1_group_laws();
  const oracle::DistanceTable table = criterion2_state_space(out_dir);
  criterion3_oracle_consistency(table);
  criterion4_gradients();
  criterion5_next_state_learnability();
  const std::string nodelambda_model =
      criterion6_distance_fidelity(table, out_dir);
  const std::string tabular_model = criterion7_tabular(table, out_dir);
  criterion8_ordering(table, out_dir, tabular_model, nodelambda_model);
  criterion9_determinism(table, out_dir);
  criterion10_backward_validity();

  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
  return 1;
}
