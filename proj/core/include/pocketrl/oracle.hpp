#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pocketrl/cube.hpp"

namespace pocketrl::oracle {

// Exact ground truth: BFS over all 3,674,160 canonical states. Verification
// only -- agents never receive a table handle during training.

inline constexpr std::uint8_t kUnvisited = 0xFF;

class DistanceTable {
 public:
  DistanceTable() = default;

  // Full BFS from the solved state over canonicalized successors.
  static DistanceTable build();

  // Wraps a raw distance array (tests build depth-limited tables this way).
  static DistanceTable from_raw(std::vector<std::uint8_t> distances);

  bool built() const { return !distances_.empty(); }

  // Distance of a canonical index; the state-level queries live below.
  int at(cube::CanonicalIndex index) const;

  int max_distance() const;
  // counts[d] = number of canonical states at distance d.
  std::array<std::uint64_t, 32> histogram() const;

  // Oracle file: magic "NLOR", version u32 LE, 3,674,160 distance bytes,
  // u64 LE checksum (sum of all distance bytes). Throws IoError.
  void save(const std::string& path) const;
  static DistanceTable load(const std::string& path);

  const std::vector<std::uint8_t>& raw() const { return distances_; }

 private:
  std::vector<std::uint8_t> distances_;
};

// Exact optimal quarter-turn distance to the goal. Throws std::logic_error
// on an unbuilt table.
int optimal_distance(const DistanceTable& table, const cube::CubeState& s);

// Lowest-ordinal move that decreases the optimal distance. Throws
// std::domain_error for a solved input.
cube::Move optimal_move(const DistanceTable& table, const cube::CubeState& s);

}  // namespace pocketrl::oracle
