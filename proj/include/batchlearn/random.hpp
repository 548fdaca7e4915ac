#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace batchlearn {

using Seed = std::uint64_t;
using Engine = std::mt19937_64;

// Domain tags keep the streams of different consumers disjoint.
enum class StreamTag : std::uint64_t {
  kOverlaps = 0x6f76,
  kRun = 0x7275,
  kQuenchedVector = 0x7176,
  kEnsembleVector = 0x6576,
  kBootstrap = 0x6273,
  kCell = 0x6365,
};

// splitmix64 finalizer: a bijective avalanche on 64-bit words.
constexpr std::uint64_t avalanche(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based derivation of a child seed. The result depends only on the
// parent seed and the ordered keys, never on call order.
constexpr Seed derive_seed(Seed parent, std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = avalanche(parent);
  for (std::uint64_t k : keys) h = avalanche(h ^ avalanche(k));
  return h;
}

inline Engine make_engine(Seed seed) { return Engine(avalanche(seed)); }

// Uniform on (0, 1]; 53 random bits, never zero, so log(u) is finite.
inline double uniform_open_zero(Engine& eng) {
  return static_cast<double>((eng() >> 11) + 1) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by 128-bit multiply-shift.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t bound) {
  const unsigned __int128 wide = static_cast<unsigned __int128>(eng()) * bound;
  return static_cast<std::uint64_t>(wide >> 64);
}

}  // namespace batchlearn
