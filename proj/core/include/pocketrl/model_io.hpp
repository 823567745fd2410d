#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pocketrl/nn.hpp"

namespace pocketrl::nn {

// Model file format, bit-exact:
//   magic "NLRL", version u32 LE, network count u32 LE,
//   per network: layer count u32 LE,
//     per layer: in_dim u32 LE, out_dim u32 LE,
//       weights row-major f32 LE, then biases f32 LE.
// A tabular value table may follow the network list (network count 0 for the
// tabular agent): record count u32 LE, then records sorted by index, each
// index u32 LE + 12 f32 LE action values.
//
// Output activations are not part of the format; loaders assign them from
// the agent architecture.

inline constexpr std::uint32_t kModelFormatVersion = 1;

struct TableRecord {
  std::uint32_t index = 0;
  std::array<float, 12> values{};
};

struct ModelFile {
  std::vector<MLP> networks;
  std::vector<TableRecord> table;
};

// Throws IoError on filesystem or format problems.
void save_model(const std::string& path, const ModelFile& model);
ModelFile load_model(const std::string& path);

}  // namespace pocketrl::nn
