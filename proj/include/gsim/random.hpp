#pragma once

#include <array>
#include <cstdint>

namespace gsim {

/// Philox4x32-10 counter-based generator (Salmon et al. reference
/// constants). Stateless: each 128-bit counter block maps to four 32-bit
/// words under a 64-bit key, so any (seed, frame, sample) triple can be
/// evaluated independently of every other draw. That is what makes
/// ensembles bitwise reproducible no matter how frames are sharded
/// across worker threads.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key) noexcept;

/// One lane of the per-frame randomness of an ensemble. frame_index picks
/// the block; sample_index inside a frame picks the counter word.
struct RandomStream {
  std::uint64_t seed = 0;
  std::uint64_t frame_index = 0;

  /// Pair of independent standard normal draws for one grid sample
  /// (Box-Muller over one Philox block). Deterministic in
  /// (seed, frame_index, sample_index).
  [[nodiscard]] std::array<double, 2> normal_pair(std::uint64_t sample_index) const noexcept;

  /// Uniform double in [0, 1) for auxiliary draws; lane separates uses.
  [[nodiscard]] double uniform(std::uint64_t sample_index, std::uint32_t lane) const noexcept;
};

} // namespace gsim
