#pragma once

#include <cstdint>

namespace noma_aoi {

/// Stateless counter-based random stream: every draw is a pure function of
/// (seed, node, slot, draw index), so a run is reproducible regardless of
/// evaluation order and replications never share a stream.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  /// Key for one (node, slot) cell; draws within the cell are indexed.
  constexpr std::uint64_t cell(std::uint64_t node, std::uint64_t slot) const noexcept {
    return mix(mix(seed_ ^ (node * 0x9e3779b97f4a7c15ULL)) ^ (slot * 0xd1b54a32d192ed03ULL));
  }

  static constexpr std::uint64_t bits(std::uint64_t cell_key, std::uint64_t draw) noexcept {
    return mix(cell_key + (draw + 1) * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  static constexpr double uniform(std::uint64_t cell_key, std::uint64_t draw) noexcept {
    return static_cast<double>(bits(cell_key, draw) >> 11) * 0x1.0p-53;
  }

  /// SplitMix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
};

}  // namespace noma_aoi
