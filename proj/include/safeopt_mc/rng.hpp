#pragma once

#include <cstdint>

namespace safeopt_mc {

/// Independent random streams derived from one root seed.
enum class Stream : std::uint64_t {
  SyntheticDraw = 1,
  ModelNoise = 2,
  PlantNoise = 3,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based split: the child seed depends only on (root, stream, index).
inline std::uint64_t derive_seed(std::uint64_t root, Stream stream, std::uint64_t index = 0) {
  return splitmix64(splitmix64(splitmix64(root) ^ static_cast<std::uint64_t>(stream)) + index);
}

}  // namespace safeopt_mc
