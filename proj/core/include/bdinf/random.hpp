#pragma once

#include <cstdint>
#include <random>

namespace bdinf {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of substream `stream` under `master`.
///
/// derive_seed(m, s) = splitmix64(splitmix64(m) ^ splitmix64(s + 0x9E3779B97F4A7C15)).
/// Every parallel loop in the library indexes substreams by task number (design point,
/// time point, replicate block), never by worker, so results do not depend on how many
/// workers run the loop.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

inline Rng make_stream(std::uint64_t master, std::uint64_t stream) {
  return Rng(derive_seed(master, stream));
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace bdinf
