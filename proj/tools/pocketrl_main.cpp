// pocketrl command line: oracle construction, agent training, evaluation,
// the four-agent benchmark, and the gradient verification suite.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "pocketrl/gradcheck.hpp"
#include "pocketrl/harness/bench.hpp"
#include "pocketrl/harness/config.hpp"
#include "pocketrl/harness/report.hpp"
#include "pocketrl/harness/train.hpp"

namespace {

using namespace pocketrl;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> agent;
  std::optional<std::int64_t> timesteps;
  std::optional<int> eval_cubes;
  std::optional<int> depth_min;
  std::optional<int> depth_max;
  std::optional<int> max_steps;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_agent) {
  cmd->add_option("--config", opts.config_path, "Config file (JSON)");
  cmd->add_option("--seed", opts.seed, "Master seed (u64)");
  cmd->add_option("--out", opts.out_dir, "Output directory");
  if (with_agent)
    cmd->add_option("--agent", opts.agent,
                    "Agent: random|tabular|dqn|nodelambda");
  cmd->add_option("--timesteps", opts.timesteps, "Training step budget");
  cmd->add_option("--eval-cubes", opts.eval_cubes, "Evaluation cube count");
  cmd->add_option("--depth-min", opts.depth_min, "Scramble depth lower bound");
  cmd->add_option("--depth-max", opts.depth_max, "Scramble depth upper bound");
  cmd->add_option("--max-steps", opts.max_steps, "Per-episode move budget");
}

harness::ExperimentConfig build_config(const CommonOpts& opts,
                                       bool depths_apply_to_eval) {
  harness::ExperimentConfig config = opts.config_path.empty()
                                         ? harness::default_config()
                                         : harness::load_config(opts.config_path);
  if (opts.seed) config.master_seed = *opts.seed;
  if (opts.agent) config.agent = *opts.agent;
  if (opts.timesteps) {
    // The flag pins the effective budget: clear per-agent overrides.
    config.total_timesteps = *opts.timesteps;
    config.tabular_over.timesteps = 0;
    config.dqn_over.timesteps = 0;
    config.nodelambda_over.timesteps = 0;
  }
  if (opts.eval_cubes) config.eval.cubes = *opts.eval_cubes;
  if (depths_apply_to_eval) {
    if (opts.depth_min) config.eval.depth_min = *opts.depth_min;
    if (opts.depth_max) config.eval.depth_max = *opts.depth_max;
    if (opts.max_steps) config.eval.max_steps = *opts.max_steps;
  } else {
    if (opts.depth_min) {
      config.env.scramble_depth_min = *opts.depth_min;
      config.tabular_over.depth_min = 0;
      config.dqn_over.depth_min = 0;
      config.nodelambda_over.depth_min = 0;
    }
    if (opts.depth_max) {
      config.env.scramble_depth_max = *opts.depth_max;
      config.tabular_over.depth_max = 0;
      config.dqn_over.depth_max = 0;
      config.nodelambda_over.depth_max = 0;
    }
    if (opts.max_steps) config.env.max_steps = *opts.max_steps;
  }
  harness::validate(config);
  return config;
}

oracle::DistanceTable load_or_build_oracle(const std::string& path,
                                           bool build_if_missing) {
  if (std::filesystem::exists(path)) return oracle::DistanceTable::load(path);
  if (!build_if_missing) throw IoError("oracle file not found: " + path);
  std::cout << "oracle file not found, building: " << path << "\n";
  oracle::DistanceTable table = oracle::DistanceTable::build();
  std::filesystem::create_directories(
      std::filesystem::path(path).parent_path());
  table.save(path);
  return table;
}

int cmd_oracle_build(const std::string& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  oracle::DistanceTable table = oracle::DistanceTable::build();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/oracle.nlor";
  table.save(path);

  const auto hist = table.histogram();
  std::uint64_t total = 0;
  for (std::uint64_t n : hist) total += n;
  std::printf("oracle built in %.1f s: %llu states, max distance %d\n", secs,
              static_cast<unsigned long long>(total), table.max_distance());
  for (int d = 0; d <= table.max_distance(); ++d)
    std::printf("  depth %2d: %llu\n", d,
                static_cast<unsigned long long>(hist[static_cast<std::size_t>(d)]));
  std::printf("saved: %s\n", path.c_str());
  return 0;
}

int cmd_train(const CommonOpts& opts) {
  const harness::ExperimentConfig config = build_config(opts, false);
  const harness::TrainResult result =
      harness::train(config, opts.out_dir);
  std::printf("trained %s: %lld timesteps, %lld episodes%s\n",
              config.agent.c_str(),
              static_cast<long long>(result.timesteps),
              static_cast<long long>(result.episodes),
              result.early_stopped ? " (early stop)" : "");
  std::printf("model: %s\nlog:   %s\n", result.model_path.c_str(),
              result.log_path.c_str());
  return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& model_path,
             const std::string& oracle_path) {
  const harness::ExperimentConfig config = build_config(opts, true);
  if (config.agent != "random" && model_path.empty())
    throw ConfigError("--model is required unless --agent random");

  const std::string oracle_file =
      oracle_path.empty() ? opts.out_dir + "/oracle.nlor" : oracle_path;
  const oracle::DistanceTable table =
      load_or_build_oracle(oracle_file, /*build_if_missing=*/false);

  const harness::LoadedAgent loaded = harness::load_agent(config, model_path);
  harness::EvalReport report = harness::evaluate(
      loaded.eval_policy, config.eval, table, config.master_seed);
  report.agent = config.agent;
  report.timesteps = harness::effective_timesteps(config, config.agent);
  report.config_digest = harness::config_digest(config);

  std::filesystem::create_directories(opts.out_dir);
  harness::append_csv(opts.out_dir + "/eval.csv", report);
  harness::write_report_file(
      opts.out_dir + "/" + config.agent + "_report.txt", report);

  std::printf("%s solved %d/%d (%.1f%%), mean steps %.2f, gap %.2f\n",
              config.agent.c_str(), report.solved_count, report.total,
              100.0 * report.solved_count / std::max(report.total, 1),
              report.mean_steps, report.optimality_gap);
  return 0;
}

int cmd_bench(const CommonOpts& opts, const std::string& oracle_path) {
  const harness::ExperimentConfig config = build_config(opts, true);
  const std::string oracle_file =
      oracle_path.empty() ? opts.out_dir + "/oracle.nlor" : oracle_path;
  const oracle::DistanceTable table =
      load_or_build_oracle(oracle_file, /*build_if_missing=*/true);

  const harness::BenchResult result =
      harness::bench(config, table, opts.out_dir);
  std::cout << result.table;
  std::printf("csv: %s\n", result.csv_path.c_str());
  return 0;
}

int cmd_gradcheck(int trials, std::uint64_t seed) {
  const nn::GradcheckReport report = nn::gradcheck(trials, seed);
  std::printf("gradcheck: %d/%d architectures passed, worst rel error %.3g\n",
              report.trials - report.failures, report.trials,
              report.worst_rel_error);
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pocketrl: a 2x2x2 cube reinforcement-learning laboratory"};
  app.require_subcommand(1);

  // oracle build
  CLI::App* oracle_cmd = app.add_subcommand("oracle", "Distance-table tools");
  oracle_cmd->require_subcommand(1);
  std::string oracle_out = "out";
  CLI::App* oracle_build =
      oracle_cmd->add_subcommand("build", "Build the exact distance table");
  oracle_build->add_option("--out", oracle_out, "Output directory");

  // train
  CommonOpts train_opts;
  CLI::App* train_cmd = app.add_subcommand("train", "Train one agent");
  add_common(train_cmd, train_opts, true);

  // eval
  CommonOpts eval_opts;
  std::string eval_model;
  std::string eval_oracle;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Evaluate a trained model (or random)");
  add_common(eval_cmd, eval_opts, true);
  eval_cmd->add_option("--model", eval_model, "Model file (.nlrl)");
  eval_cmd->add_option("--oracle", eval_oracle, "Oracle file (.nlor)");

  // bench
  CommonOpts bench_opts;
  std::string bench_oracle;
  CLI::App* bench_cmd = app.add_subcommand(
      "bench", "Train and evaluate all four agents on one protocol");
  add_common(bench_cmd, bench_opts, false);
  bench_cmd->add_option("--oracle", bench_oracle, "Oracle file (.nlor)");

  // gradcheck
  int gc_trials = 50;
  std::uint64_t gc_seed = 1;
  CLI::App* gradcheck_cmd =
      app.add_subcommand("gradcheck", "Finite-difference gradient suite");
  gradcheck_cmd->add_option("--trials", gc_trials, "Architectures to test");
  gradcheck_cmd->add_option("--seed", gc_seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (oracle_build->parsed()) return cmd_oracle_build(oracle_out);
    if (train_cmd->parsed()) return cmd_train(train_opts);
    if (eval_cmd->parsed()) return cmd_eval(eval_opts, eval_model, eval_oracle);
    if (bench_cmd->parsed()) return cmd_bench(bench_opts, bench_oracle);
    if (gradcheck_cmd->parsed()) return cmd_gradcheck(gc_trials, gc_seed);
  } catch (const pocketrl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const pocketrl::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
