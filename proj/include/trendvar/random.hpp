// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace trendvar {

using Engine = std::mt19937_64;

/// Independent generator for substream `stream` of a top-level seed. The
/// same (seed, stream) pair always yields the same sequence, regardless of
/// which thread draws from it.
inline Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x9e3779b9u};
  return Engine(seq);
}

// Substream tags so that different consumers of one seed never overlap.
namespace streams {
inline constexpr std::uint64_t kTrendInit = 1;
inline constexpr std::uint64_t kSyntheticTrend = 2;
inline constexpr std::uint64_t kSimulationBase = 1000;
}  // namespace streams

}  // namespace trendvar
