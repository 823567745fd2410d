#pragma once

#include <string>
#include <vector>

#include "pocketrl/harness/config.hpp"
#include "pocketrl/harness/evaluate.hpp"

namespace pocketrl::harness {

struct BenchResult {
  std::vector<EvalReport> reports;  // random, tabular, dqn, nodelambda
  std::string csv_path;
  std::string table;  // printable agent-comparison table
};

// Trains tabular, dqn, and nodelambda under their per-agent budgets, then
// evaluates all four agents (random included) on the shared evaluation
// protocol, appending one CSV row per agent to <out_dir>/bench.csv.
BenchResult bench(const ExperimentConfig& config,
                  const oracle::DistanceTable& table,
                  const std::string& out_dir);

}  // namespace pocketrl::harness
