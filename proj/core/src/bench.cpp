#include "pocketrl/harness/bench.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "pocketrl/harness/report.hpp"
#include "pocketrl/harness/train.hpp"

namespace pocketrl::harness {

BenchResult bench(const ExperimentConfig& config,
                  const oracle::DistanceTable& table,
                  const std::string& out_dir) {
  validate(config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  BenchResult result;
  result.csv_path = out_dir + "/bench.csv";
  const std::string digest = config_digest(config);

  for (const char* agent : {"random", "tabular", "dqn", "nodelambda"}) {
    ExperimentConfig agent_config = config;
    agent_config.agent = agent;

    std::string model_path;
    std::int64_t trained_steps = 0;
    if (std::string(agent) != "random") {
      const TrainResult tr = train(agent_config, out_dir);
      model_path = tr.model_path;
      trained_steps = tr.timesteps;
    }

    const LoadedAgent loaded = load_agent(agent_config, model_path);
    EvalReport report = evaluate(loaded.eval_policy, config.eval, table,
                                 config.master_seed);
    report.agent = agent;
    report.timesteps = trained_steps;
    report.config_digest = digest;

    append_csv(result.csv_path, report);
    write_report_file(out_dir + "/" + agent + "_report.txt", report);
    result.reports.push_back(std::move(report));
  }

  std::ostringstream tbl;
  tbl << "agent        solved/total  solve_rate  mean_steps  optimality_gap\n";
  for (const EvalReport& r : result.reports) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-12s %6d/%-6d %9.3f %11.2f %15.2f\n",
                  r.agent.c_str(), r.solved_count, r.total,
                  r.total > 0 ? static_cast<double>(r.solved_count) / r.total
                              : 0.0,
                  r.mean_steps, r.optimality_gap);
    tbl << buf;
  }
  result.table = tbl.str();
  return result;
}

}  // namespace pocketrl::harness
