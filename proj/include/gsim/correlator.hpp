#pragma once

#include "gsim/grid.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace gsim {

enum class PairingMode {
  ghost_symmetric, // bin at x1 pairs I1(x1) with I2(-x1): back-to-back slice
  hbt_symmetric,   // bin at x1 pairs I1(x1) with I1(-x1): single-arm slice
  full_matrix,     // delta I(x1, x2) on a decimated index set
};

/// Streaming second-order accumulator. Holds per-jackknife-block partial
/// sums of I1, I2 and I1*I2 per output bin, so merging two accumulators
/// is plain bin-wise addition (commutative), finalize is a single pass,
/// and block resampling gives the statistical error without a second
/// sweep over the data. Block membership depends only on the global
/// frame index, never on which worker processed the frame.
class CorrelationAccumulator {
public:
  CorrelationAccumulator(PairingMode mode, const SampleGrid& grid, std::uint64_t block_length,
                         std::size_t matrix_bins = 128);

  [[nodiscard]] PairingMode mode() const noexcept { return m_mode; }
  [[nodiscard]] const SampleGrid& grid() const noexcept { return m_grid; }
  [[nodiscard]] std::uint64_t count() const noexcept { return m_count; }
  [[nodiscard]] std::uint64_t block_length() const noexcept { return m_block_length; }
  [[nodiscard]] std::size_t bin_count() const noexcept { return m_bins; }

  /// Profile coordinate of each output bin (the arm-1 detector position;
  /// the partner sample sits at the mirrored coordinate), ascending. For
  /// full_matrix, the decimated axis shared by both indices.
  [[nodiscard]] const std::vector<double>& axis() const noexcept { return m_axis; }

  bool compatible(const CorrelationAccumulator& other) const noexcept;

private:
  struct Block {
    std::uint64_t count = 0;
    std::vector<double> s1, s2, s12;
  };

  PairingMode m_mode;
  SampleGrid m_grid;
  std::uint64_t m_block_length;
  std::size_t m_matrix_bins;
  std::size_t m_bins;
  std::vector<double> m_axis;
  std::vector<std::size_t> m_index1, m_index2; // grid indices feeding each bin
  std::vector<Block> m_blocks;
  std::uint64_t m_count = 0;

  Block& block_for(std::uint64_t frame_index);

  friend void accumulate(CorrelationAccumulator&, const IntensityFrame&,
                         const std::optional<IntensityFrame>&, std::optional<std::uint64_t>);
  friend void merge(CorrelationAccumulator&, const CorrelationAccumulator&);
  friend struct FinalizeAccess;
};

/// Fold one frame (hbt) or one frame pair (ghost, full_matrix) into the
/// sums. frame2 must be present exactly when the mode pairs two arms.
/// frame_index fixes the jackknife block; by default frames are taken as
/// arriving in sequence.
void accumulate(CorrelationAccumulator& acc, const IntensityFrame& frame1,
                const std::optional<IntensityFrame>& frame2 = std::nullopt,
                std::optional<std::uint64_t> frame_index = std::nullopt);

/// Add other's sums into acc. Accumulators must share mode, grid, block
/// length and (for full_matrix) decimation.
void merge(CorrelationAccumulator& acc, const CorrelationAccumulator& other);

/// delta I profile for the symmetric modes.
struct CorrelationProfile {
  PairingMode mode = PairingMode::ghost_symmetric;
  std::vector<double> axis;        // meters, ascending
  std::vector<double> delta_i;     // <I1 I2> - <I1><I2> per bin
  std::vector<double> g2_minus_1;  // delta_i / (<I1><I2>), 0 where means vanish
  std::vector<double> mean1, mean2;
  std::uint64_t count = 0;
};

/// Decimated delta I(x1, x2) for full_matrix mode, row-major in x1.
struct CorrelationMatrix {
  std::vector<double> axis;
  std::vector<double> delta_i;
  std::vector<double> g2_minus_1;
  std::uint64_t count = 0;
};

/// Mean-subtracted correlation per bin; needs at least 2 frames.
CorrelationProfile finalize(const CorrelationAccumulator& acc);
CorrelationMatrix finalize_matrix(const CorrelationAccumulator& acc);

/// Per-bin standard error of delta I by delete-one-block jackknife.
/// Needs at least 10 frames spread over at least 2 blocks.
std::vector<double> estimate_statistical_error(const CorrelationAccumulator& acc);

/// Delete-one-block profiles, one per populated block, for jackknife
/// resampling of statistics derived from a profile (fringe power, fitted
/// scales). Same preconditions as estimate_statistical_error.
std::vector<CorrelationProfile> jackknife_profiles(const CorrelationAccumulator& acc);

} // namespace gsim
