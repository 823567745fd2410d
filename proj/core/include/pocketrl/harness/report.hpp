#pragma once

#include <string>

#include "pocketrl/harness/evaluate.hpp"

namespace pocketrl::harness {

// CSV schema, one row per evaluation:
//   agent,seed,total,solved,solve_rate,mean_steps,optimality_gap,timesteps,wall_time
// Doubles print with max_digits10 so a parsed row reproduces the report's
// numeric fields exactly. wall_time is last and excluded from determinism
// comparisons.
inline constexpr const char* kCsvHeader =
    "agent,seed,total,solved,solve_rate,mean_steps,optimality_gap,timesteps,"
    "wall_time";

std::string csv_row(const EvalReport& report);

// Appends one row, writing the header first when the file is new or empty.
// Throws IoError with the path on failure.
void append_csv(const std::string& csv_path, const EvalReport& report);

// Numeric fields parsed back from a csv_row line (agent, seed, totals,
// rates); per-depth details are not in the CSV.
struct CsvRow {
  std::string agent;
  std::uint64_t seed = 0;
  int total = 0;
  int solved = 0;
  double solve_rate = 0.0;
  double mean_steps = 0.0;
  double optimality_gap = 0.0;
  std::int64_t timesteps = 0;
  double wall_time = 0.0;
};
CsvRow parse_csv_row(const std::string& line);

// Full structured text report (per-depth table, unsolved start states).
std::string report_to_string(const EvalReport& report);
void write_report_file(const std::string& path, const EvalReport& report);

}  // namespace pocketrl::harness
