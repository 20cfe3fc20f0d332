#include "gsim/correlator.hpp"

#include "gsim/errors.hpp"

#include <cmath>
#include <string>

namespace gsim {

CorrelationAccumulator::CorrelationAccumulator(PairingMode mode, const SampleGrid& grid,
                                               std::uint64_t block_length,
                                               std::size_t matrix_bins)
    : m_mode(mode), m_grid(grid), m_block_length(block_length), m_matrix_bins(matrix_bins) {
  if (block_length == 0) throw ValidationError("block_length must be positive");
  const std::size_t n = grid.n;
  if (mode == PairingMode::full_matrix) {
    if (matrix_bins == 0 || matrix_bins > n) {
      throw ValidationError("matrix_bins must lie in [1, grid n]");
    }
    const std::size_t stride = n / matrix_bins;
    m_bins = matrix_bins * matrix_bins;
    m_axis.resize(matrix_bins);
    m_index1.resize(m_bins);
    m_index2.resize(m_bins);
    for (std::size_t r = 0; r < matrix_bins; ++r) {
      // Offset by stride/2 keeps the decimated axis symmetric about 0.
      const std::size_t ir = r * stride + stride / 2;
      m_axis[r] = grid.coord(ir);
      for (std::size_t c = 0; c < matrix_bins; ++c) {
        m_index1[r * matrix_bins + c] = ir;
        m_index2[r * matrix_bins + c] = c * stride + stride / 2;
      }
    }
  } else {
    // Sample 0 has no mirror partner; bins run over x = x[1] .. x[n-1].
    m_bins = n - 1;
    m_axis.resize(m_bins);
    m_index1.resize(m_bins);
    m_index2.resize(m_bins);
    for (std::size_t j = 0; j < m_bins; ++j) {
      const std::size_t m = j + 1; // grid index of the bin coordinate
      m_axis[j] = grid.coord(m);
      // Bin at x multiplies I1(x) with the mirrored sample: I2(-x) for
      // ghost pairing, I1(-x) for hbt pairing.
      m_index1[j] = m;
      m_index2[j] = grid.mirror_index(m);
    }
  }
}

bool CorrelationAccumulator::compatible(const CorrelationAccumulator& other) const noexcept {
  return m_mode == other.m_mode && m_grid == other.m_grid &&
         m_block_length == other.m_block_length && m_matrix_bins == other.m_matrix_bins;
}

CorrelationAccumulator::Block& CorrelationAccumulator::block_for(std::uint64_t frame_index) {
  const std::size_t b = static_cast<std::size_t>(frame_index / m_block_length);
  if (b >= m_blocks.size()) m_blocks.resize(b + 1);
  Block& block = m_blocks[b];
  if (block.s1.empty()) {
    block.s1.assign(m_bins, 0.0);
    block.s2.assign(m_bins, 0.0);
    block.s12.assign(m_bins, 0.0);
  }
  return block;
}

void accumulate(CorrelationAccumulator& acc, const IntensityFrame& frame1,
                const std::optional<IntensityFrame>& frame2,
                std::optional<std::uint64_t> frame_index) {
  const bool wants_two = acc.m_mode != PairingMode::hbt_symmetric;
  if (wants_two != frame2.has_value()) {
    throw ValidationError(wants_two ? "this pairing mode needs a frame from each arm"
                                    : "hbt pairing takes a single arm frame");
  }
  if (frame1.grid != acc.m_grid || (frame2 && frame2->grid != acc.m_grid)) {
    throw ValidationError("frame grid does not match the accumulator grid");
  }
  const std::vector<double>& v1 = frame1.values;
  const std::vector<double>& v2 = frame2 ? frame2->values : frame1.values;

  auto& block = acc.block_for(frame_index.value_or(acc.m_count));
  for (std::size_t j = 0; j < acc.m_bins; ++j) {
    const double a = v1[acc.m_index1[j]];
    const double b = v2[acc.m_index2[j]];
    block.s1[j] += a;
    block.s2[j] += b;
    block.s12[j] += a * b;
  }
  ++block.count;
  ++acc.m_count;
}

void merge(CorrelationAccumulator& acc, const CorrelationAccumulator& other) {
  if (!acc.compatible(other)) {
    throw ValidationError("accumulators differ in mode, grid or block layout");
  }
  if (other.m_blocks.size() > acc.m_blocks.size()) acc.m_blocks.resize(other.m_blocks.size());
  for (std::size_t b = 0; b < other.m_blocks.size(); ++b) {
    const auto& src = other.m_blocks[b];
    if (src.count == 0) continue;
    auto& dst = acc.m_blocks[b];
    if (dst.s1.empty()) {
      dst = src;
      continue;
    }
    dst.count += src.count;
    for (std::size_t j = 0; j < acc.m_bins; ++j) {
      dst.s1[j] += src.s1[j];
      dst.s2[j] += src.s2[j];
      dst.s12[j] += src.s12[j];
    }
  }
  acc.m_count += other.m_count;
}

namespace {

struct Totals {
  std::vector<double> s1, s2, s12;
  double count = 0.0;
};

} // namespace

struct FinalizeAccess {
  static Totals totals(const CorrelationAccumulator& acc) {
    Totals t;
    t.s1.assign(acc.m_bins, 0.0);
    t.s2.assign(acc.m_bins, 0.0);
    t.s12.assign(acc.m_bins, 0.0);
    for (const auto& block : acc.m_blocks) {
      if (block.count == 0) continue;
      for (std::size_t j = 0; j < acc.m_bins; ++j) {
        t.s1[j] += block.s1[j];
        t.s2[j] += block.s2[j];
        t.s12[j] += block.s12[j];
      }
    }
    t.count = static_cast<double>(acc.m_count);
    return t;
  }

  static void require_resamplable(const CorrelationAccumulator& acc, std::size_t live) {
    if (acc.m_count < 10 || live < 2) {
      throw ValidationError("error estimation needs at least 10 frames in at least 2 blocks");
    }
  }

  static std::size_t live_blocks(const CorrelationAccumulator& acc) {
    std::size_t live = 0;
    for (const auto& b : acc.m_blocks) {
      if (b.count > 0) ++live;
    }
    return live;
  }

  static std::vector<double> jackknife(const CorrelationAccumulator& acc) {
    const Totals t = totals(acc);
    const std::size_t live = live_blocks(acc);
    require_resamplable(acc, live);
    const double big_b = static_cast<double>(live);
    std::vector<double> mean(acc.m_bins, 0.0);
    std::vector<std::vector<double>> deletes;
    deletes.reserve(live);
    for (const auto& block : acc.m_blocks) {
      if (block.count == 0) continue;
      const double rest = t.count - static_cast<double>(block.count);
      std::vector<double> est(acc.m_bins);
      for (std::size_t j = 0; j < acc.m_bins; ++j) {
        const double m1 = (t.s1[j] - block.s1[j]) / rest;
        const double m2 = (t.s2[j] - block.s2[j]) / rest;
        est[j] = (t.s12[j] - block.s12[j]) / rest - m1 * m2;
        mean[j] += est[j];
      }
      deletes.push_back(std::move(est));
    }
    for (auto& m : mean) m /= big_b;
    std::vector<double> se(acc.m_bins, 0.0);
    for (const auto& est : deletes) {
      for (std::size_t j = 0; j < acc.m_bins; ++j) {
        const double d = est[j] - mean[j];
        se[j] += d * d;
      }
    }
    for (auto& s : se) s = std::sqrt(s * (big_b - 1.0) / big_b);
    return se;
  }

  static std::vector<CorrelationProfile> delete_one(const CorrelationAccumulator& acc) {
    const Totals t = totals(acc);
    require_resamplable(acc, live_blocks(acc));
    std::vector<CorrelationProfile> profiles;
    for (const auto& block : acc.m_blocks) {
      if (block.count == 0) continue;
      const double rest = t.count - static_cast<double>(block.count);
      CorrelationProfile p;
      p.mode = acc.m_mode;
      p.axis = acc.m_axis;
      p.count = acc.m_count - block.count;
      p.delta_i.resize(acc.m_bins);
      p.g2_minus_1.resize(acc.m_bins);
      p.mean1.resize(acc.m_bins);
      p.mean2.resize(acc.m_bins);
      for (std::size_t j = 0; j < acc.m_bins; ++j) {
        p.mean1[j] = (t.s1[j] - block.s1[j]) / rest;
        p.mean2[j] = (t.s2[j] - block.s2[j]) / rest;
        p.delta_i[j] = (t.s12[j] - block.s12[j]) / rest - p.mean1[j] * p.mean2[j];
        const double denom = p.mean1[j] * p.mean2[j];
        p.g2_minus_1[j] = (denom > 0.0) ? p.delta_i[j] / denom : 0.0;
      }
      profiles.push_back(std::move(p));
    }
    return profiles;
  }
};

namespace {

void fill_delta(const Totals& t, std::vector<double>& delta, std::vector<double>& g2m1,
                std::vector<double>& mean1, std::vector<double>& mean2) {
  const std::size_t bins = t.s1.size();
  delta.resize(bins);
  g2m1.resize(bins);
  mean1.resize(bins);
  mean2.resize(bins);
  for (std::size_t j = 0; j < bins; ++j) {
    mean1[j] = t.s1[j] / t.count;
    mean2[j] = t.s2[j] / t.count;
    delta[j] = t.s12[j] / t.count - mean1[j] * mean2[j];
    const double denom = mean1[j] * mean2[j];
    g2m1[j] = (denom > 0.0) ? delta[j] / denom : 0.0;
  }
}

} // namespace

CorrelationProfile finalize(const CorrelationAccumulator& acc) {
  if (acc.mode() == PairingMode::full_matrix) {
    throw ValidationError("full_matrix accumulators finalize to a matrix");
  }
  if (acc.count() < 2) throw ValidationError("finalize needs at least 2 frames");
  CorrelationProfile profile;
  profile.mode = acc.mode();
  profile.axis = acc.axis();
  profile.count = acc.count();
  const Totals t = FinalizeAccess::totals(acc);
  fill_delta(t, profile.delta_i, profile.g2_minus_1, profile.mean1, profile.mean2);
  return profile;
}

CorrelationMatrix finalize_matrix(const CorrelationAccumulator& acc) {
  if (acc.mode() != PairingMode::full_matrix) {
    throw ValidationError("finalize_matrix needs a full_matrix accumulator");
  }
  if (acc.count() < 2) throw ValidationError("finalize needs at least 2 frames");
  CorrelationMatrix matrix;
  matrix.axis = acc.axis();
  matrix.count = acc.count();
  const Totals t = FinalizeAccess::totals(acc);
  std::vector<double> mean1, mean2;
  fill_delta(t, matrix.delta_i, matrix.g2_minus_1, mean1, mean2);
  return matrix;
}

std::vector<double> estimate_statistical_error(const CorrelationAccumulator& acc) {
  return FinalizeAccess::jackknife(acc);
}

std::vector<CorrelationProfile> jackknife_profiles(const CorrelationAccumulator& acc) {
  return FinalizeAccess::delete_one(acc);
}

} // namespace gsim
