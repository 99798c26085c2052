#pragma once

#include <cstdint>

namespace sparsegd {

// All randomness in the library flows through std::mt19937_64 engines that
// are constructed from an explicit 64-bit seed at the call site. A seed fully
// determines the output on a given standard library implementation; bit
// equality across implementations is not promised.

// Derives independent per-purpose seeds from a base seed. splitmix64 is the
// usual choice for seed expansion and keeps distinct (base, stream) pairs
// from colliding in practice.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace sparsegd
