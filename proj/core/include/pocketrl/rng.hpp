#pragma once

#include <cstdint>
#include <random>

namespace pocketrl {

// splitmix64 finalizer; the project's standard 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Per-stream seed derivation: master xor stream index, mixed. Parallel
// consumers seeded this way match serial execution exactly.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ index);
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t index) {
  return std::mt19937_64(derive_seed(master, index));
}

}  // namespace pocketrl
