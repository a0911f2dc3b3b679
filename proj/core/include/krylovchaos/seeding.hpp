#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace kc {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based seed derivation: the result depends only on the arguments,
/// never on how many other streams were drawn before.
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t key) {
  return mix64(mix64(master) ^ key);
}

constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t key, std::uint64_t index) {
  return split_seed(split_seed(master, key), index);
}

/// Stable key for a grid value, so that a point's streams do not depend on
/// its position in the grid.
inline std::uint64_t grid_key(double value) {
  return mix64(std::bit_cast<std::uint64_t>(value == 0.0 ? 0.0 : value));
}

/// Named sub-streams derived from one realization seed.
enum class Stream : std::uint64_t { Hamiltonian = 1, Disorder = 2, InitialState = 3 };

inline std::mt19937_64 make_engine(std::uint64_t seed, Stream stream) {
  return std::mt19937_64(split_seed(seed, static_cast<std::uint64_t>(stream)));
}

}  // namespace kc
