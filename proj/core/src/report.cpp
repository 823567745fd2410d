#include "pocketrl/harness/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pocketrl/errors.hpp"

namespace pocketrl::harness {
namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string csv_row(const EvalReport& r) {
  std::ostringstream out;
  const double solve_rate =
      r.total > 0 ? static_cast<double>(r.solved_count) / r.total : 0.0;
  out << r.agent << ',' << r.seed << ',' << r.total << ',' << r.solved_count
      << ',' << fmt_double(solve_rate) << ',' << fmt_double(r.mean_steps)
      << ',' << fmt_double(r.optimality_gap) << ',' << r.timesteps << ','
      << fmt_double(r.wall_time);
  return out.str();
}

void append_csv(const std::string& csv_path, const EvalReport& report) {
  const bool need_header = [&] {
    std::error_code ec;
    return !std::filesystem::exists(csv_path, ec) ||
           std::filesystem::file_size(csv_path, ec) == 0;
  }();
  std::ofstream out(csv_path, std::ios::app);
  if (!out) throw IoError("cannot open CSV for append: " + csv_path);
  if (need_header) out << kCsvHeader << '\n';
  out << csv_row(report) << '\n';
  if (!out) throw IoError("write failed: " + csv_path);
}

CsvRow parse_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  if (fields.size() != 9)
    throw IoError("CSV row has " + std::to_string(fields.size()) +
                  " fields, expected 9");
  CsvRow row;
  row.agent = fields[0];
  row.seed = std::stoull(fields[1]);
  row.total = std::stoi(fields[2]);
  row.solved = std::stoi(fields[3]);
  row.solve_rate = std::stod(fields[4]);
  row.mean_steps = std::stod(fields[5]);
  row.optimality_gap = std::stod(fields[6]);
  row.timesteps = std::stoll(fields[7]);
  row.wall_time = std::stod(fields[8]);
  return row;
}

std::string report_to_string(const EvalReport& r) {
  std::ostringstream out;
  const double solve_rate =
      r.total > 0 ? static_cast<double>(r.solved_count) / r.total : 0.0;
  out << "agent: " << r.agent << '\n'
      << "seed: " << r.seed << '\n'
      << "config_digest: " << r.config_digest << '\n'
      << "timesteps: " << r.timesteps << '\n'
      << "total: " << r.total << '\n'
      << "solved: " << r.solved_count << '\n'
      << "solve_rate: " << fmt_double(solve_rate) << '\n'
      << "mean_steps: " << fmt_double(r.mean_steps) << '\n'
      << "optimality_gap: " << fmt_double(r.optimality_gap) << '\n'
      << "wall_time_s: " << fmt_double(r.wall_time) << '\n'
      << "per_depth:\n"
      << "  depth attempted solved mean_steps\n";
  for (const auto& [depth, ds] : r.per_depth) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "  %5d %9d %6d %s\n", depth, ds.attempted,
                  ds.solved, fmt_double(ds.mean_steps).c_str());
    out << buf;
  }
  if (!r.unsolved_starts.empty()) {
    out << "unsolved_start_states_hex:\n";
    for (const auto& bytes : r.unsolved_starts) {
      out << "  ";
      for (std::uint8_t b : bytes) {
        char buf[3];
        std::snprintf(buf, sizeof buf, "%02x", b);
        out << buf;
      }
      out << '\n';
    }
  }
  return out.str();
}

void write_report_file(const std::string& path, const EvalReport& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open report file: " + path);
  out << report_to_string(report);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace pocketrl::harness
