#pragma once

#include <cstdint>

namespace deepdist {

// SplitMix64 finaliser: a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent child seed, e.g. mix_seed(master, trial).
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 1));
}

// Counter-based uniform draws for sequence simulation. The draw for
// (seed, site, vertex) is a fixed function of the triple, so sites can be
// generated in any order or in parallel with identical results:
//   u = top53(splitmix64(mix_seed(seed, site) + vertex * golden)) / 2^53.
class SiteStream {
 public:
  constexpr SiteStream(std::uint64_t seed, std::uint64_t site)
      : base_(mix_seed(seed, site)) {}

  double uniform(std::uint64_t vertex) const {
    const std::uint64_t bits = splitmix64(base_ + vertex * 0x9e3779b97f4a7c15ULL);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t base_;
};

}  // namespace deepdist
