#pragma once

#include <cstdint>
#include <random>

namespace hgcn {

using Rng = std::mt19937_64;

/// Named sub-streams derived from one base seed. Each source of randomness in a
/// run (split sampling, initialisation, dropout, tie-breaking, ...) draws from its
/// own stream so that changing one does not perturb the others.
enum class Stream : std::uint64_t {
  split = 1,
  init = 2,
  dropout = 3,
  ties = 4,
  generator = 5,
  shuffle = 6,
};

/// SplitMix64 finaliser; used to decorrelate (seed, stream) pairs.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, Stream stream) noexcept {
  return mix_seed(mix_seed(base) ^ mix_seed(static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL));
}

inline Rng make_rng(std::uint64_t base, Stream stream) { return Rng{derive_seed(base, stream)}; }

}  // namespace hgcn
