#pragma once

#include <cstdint>
#include <random>

namespace maobo {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Seed for the stream identified by (seed, purpose, index). Streams with
/// different purposes or indices are statistically independent.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose,
                                    std::uint64_t index = 0) noexcept {
  return mix64(mix64(mix64(seed) ^ purpose) + index);
}

namespace stream {
inline constexpr std::uint64_t kInitialDesign = 0x1D;
inline constexpr std::uint64_t kNoise = 0x2E;
inline constexpr std::uint64_t kProbeGrid = 0x3F;
inline constexpr std::uint64_t kCandidates = 0x40;
inline constexpr std::uint64_t kAcquisition = 0x51;
inline constexpr std::uint64_t kGpFit = 0x62;
inline constexpr std::uint64_t kStudyDesign = 0x73;
}  // namespace stream

}  // namespace maobo
