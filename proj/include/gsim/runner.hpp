#pragma once

#include "gsim/config.hpp"
#include "gsim/correlator.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gsim {

/// Results of one finished ensemble. The accumulators are kept alongside
/// the finalized curves so callers can resample them (jackknife) without
/// re-running the ensemble. ghost/hbt/matrix members are populated
/// according to the run mode.
struct RunOutcome {
  ExperimentConfig config; // as executed (replays reconstruct it from the header)
  std::uint64_t frames = 0;
  double wall_seconds = 0.0;
  std::optional<CorrelationAccumulator> ghost_acc;
  std::optional<CorrelationAccumulator> hbt_acc;
  std::optional<CorrelationAccumulator> matrix_acc;
  std::optional<CorrelationProfile> ghost;
  std::optional<CorrelationProfile> hbt;
  std::optional<CorrelationMatrix> matrix;
  std::vector<double> ghost_error; // per-bin jackknife SE; empty if not resamplable
  std::vector<double> hbt_error;
};

/// Hard sanity checks tying grid, source and object scales together, run
/// before the first frame of a generating ensemble:
///   - the source spot and the object aperture must fit the grid,
///   - the illumination correlation band at the mask must resolve its
///     finest feature,
///   - the detector-plane bandwidth must clear the transform's periodic
///     copies over the measured band.
/// Throws NumericalGuardError naming the failing inequality.
void check_numerical_guards(const ExperimentConfig& cfg);

/// Run a full ensemble: generate speckle frames (or stream them from an
/// archive when cfg.archive is read, in which case grid, frame count and
/// seed come from the archive header), propagate both arms, accumulate
/// the configured correlations, and finalize. Frames are sharded over
/// cfg.workers threads in jackknife-block units; results are bitwise
/// independent of the worker count.
RunOutcome run_ensemble(const ExperimentConfig& cfg);

/// Re-correlate a recorded ensemble under a different pairing mode, e.g.
/// feed a two-detector recording through the single-arm estimator.
/// block_length 0 picks the same default as a fresh run over the
/// archive's frame count.
RunOutcome replay_archive_run(const std::string& path, RunMode mode, std::size_t workers = 1,
                              std::uint64_t block_length = 0, std::size_t matrix_bins = 128);

} // namespace gsim
