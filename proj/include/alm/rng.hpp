#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace alm {

using Rng = std::mt19937_64;

// Counter-based stream derivation. A stream is identified by (root seed, name,
// index); the derived seed is SplitMix64 applied to the root mixed with an
// FNV-1a hash of the name and the index, so streams never depend on how many
// draws another stream consumed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view name, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t root, std::string_view name, std::uint64_t index = 0) {
  return Rng(derive_seed(root, name, index));
}

// Unbiased draw in [0, n) using rejection; stable across standard libraries.
std::size_t uniform_index(Rng& rng, std::size_t n);

// Uniform real in [0, 1) from the top 53 bits.
double uniform01(Rng& rng);

}  // namespace alm
