#include "pocketrl/oracle.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "pocketrl/errors.hpp"

namespace pocketrl::oracle {
namespace {

static_assert(std::endian::native == std::endian::little,
              "oracle files are little-endian; big-endian hosts unsupported");

constexpr char kMagic[4] = {'N', 'L', 'O', 'R'};
constexpr std::uint32_t kOracleFormatVersion = 1;

void require_built(const DistanceTable& t) {
  if (!t.built()) throw std::logic_error("distance table not built");
}

}  // namespace

DistanceTable DistanceTable::build() {
  using namespace pocketrl::cube;
  DistanceTable table;
  table.distances_.assign(kStateCount, kUnvisited);

  std::vector<std::uint32_t> frontier{rank(solved()).value};
  table.distances_[frontier[0]] = 0;

  std::uint8_t depth = 0;
  std::vector<std::uint32_t> next;
  while (!frontier.empty()) {
    ++depth;
    next.clear();
    for (std::uint32_t idx : frontier) {
      const CubeState s = unrank(CanonicalIndex{idx});
      for (int m = 0; m < kNumMoves; ++m) {
        const CubeState t = canonicalize(apply_move(s, static_cast<Move>(m)));
        const std::uint32_t j = rank(t).value;
        if (table.distances_[j] == kUnvisited) {
          table.distances_[j] = depth;
          next.push_back(j);
        }
      }
    }
    frontier.swap(next);
  }
  return table;
}

DistanceTable DistanceTable::from_raw(std::vector<std::uint8_t> distances) {
  if (distances.size() != cube::kStateCount)
    throw std::invalid_argument("distance array must cover all states");
  DistanceTable t;
  t.distances_ = std::move(distances);
  return t;
}

int DistanceTable::at(cube::CanonicalIndex index) const {
  require_built(*this);
  if (index.value >= cube::kStateCount)
    throw std::out_of_range("canonical index out of range");
  return distances_[index.value];
}

int DistanceTable::max_distance() const {
  require_built(*this);
  int best = 0;
  for (std::uint8_t d : distances_)
    if (d != kUnvisited && d > best) best = d;
  return best;
}

std::array<std::uint64_t, 32> DistanceTable::histogram() const {
  require_built(*this);
  std::array<std::uint64_t, 32> counts{};
  for (std::uint8_t d : distances_)
    if (d != kUnvisited && d < counts.size()) ++counts[d];
  return counts;
}

void DistanceTable::save(const std::string& path) const {
  require_built(*this);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&kOracleFormatVersion), 4);
  out.write(reinterpret_cast<const char*>(distances_.data()),
            static_cast<std::streamsize>(distances_.size()));
  std::uint64_t checksum = 0;
  for (std::uint8_t d : distances_) checksum += d;
  out.write(reinterpret_cast<const char*>(&checksum), 8);
  if (!out) throw IoError("write failed: " + path);
}

DistanceTable DistanceTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open oracle file: " + path);
  char magic[4] = {};
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("not an oracle file (bad magic): " + path);
  std::uint32_t version = 0;
  if (!in.read(reinterpret_cast<char*>(&version), 4) ||
      version != kOracleFormatVersion)
    throw IoError("unsupported oracle format version: " + path);

  DistanceTable t;
  t.distances_.resize(cube::kStateCount);
  if (!in.read(reinterpret_cast<char*>(t.distances_.data()),
               static_cast<std::streamsize>(t.distances_.size())))
    throw IoError("truncated oracle file: " + path);
  std::uint64_t stored = 0;
  if (!in.read(reinterpret_cast<char*>(&stored), 8))
    throw IoError("missing oracle checksum: " + path);
  std::uint64_t checksum = 0;
  for (std::uint8_t d : t.distances_) checksum += d;
  if (checksum != stored) throw IoError("oracle checksum mismatch: " + path);
  return t;
}

int optimal_distance(const DistanceTable& table, const cube::CubeState& s) {
  return table.at(cube::rank(cube::canonicalize(s)));
}

cube::Move optimal_move(const DistanceTable& table, const cube::CubeState& s) {
  if (cube::is_solved(s))
    throw std::domain_error("optimal_move undefined on a solved state");
  const int d = optimal_distance(table, s);
  for (int m = 0; m < cube::kNumMoves; ++m) {
    const cube::Move mv = static_cast<cube::Move>(m);
    if (optimal_distance(table, cube::apply_move(s, mv)) == d - 1) return mv;
  }
  throw std::logic_error("no descending move found; table is inconsistent");
}

}  // namespace pocketrl::oracle
