#include "gsim/runner.hpp"

#include "gsim/archive.hpp"
#include "gsim/errors.hpp"
#include "gsim/random.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <sstream>
#include <thread>
#include <vector>

namespace gsim {

namespace {

struct ModeFlags {
  bool ghost = false;
  bool hbt = false;
  bool matrix = false;
  bool two_arms = false; // does the run need the reference detector?
};

ModeFlags flags_for(RunMode mode) {
  switch (mode) {
    case RunMode::ghost: return {true, false, false, true};
    case RunMode::hbt: return {false, true, false, false};
    case RunMode::both: return {true, true, false, true};
    case RunMode::full_matrix: return {false, false, true, true};
  }
  throw ValidationError("unknown run mode");
}

struct WorkerState {
  std::optional<CorrelationAccumulator> ghost;
  std::optional<CorrelationAccumulator> hbt;
  std::optional<CorrelationAccumulator> matrix;
  std::exception_ptr error;
};

void make_accumulators(WorkerState& state, const ModeFlags& flags, const SampleGrid& grid,
                       std::uint64_t block_length, std::size_t matrix_bins) {
  if (flags.ghost) state.ghost.emplace(PairingMode::ghost_symmetric, grid, block_length);
  if (flags.hbt) state.hbt.emplace(PairingMode::hbt_symmetric, grid, block_length);
  if (flags.matrix) {
    state.matrix.emplace(PairingMode::full_matrix, grid, block_length, matrix_bins);
  }
}

void fold_frame(WorkerState& state, const IntensityFrame& frame1,
                const std::optional<IntensityFrame>& frame2, std::uint64_t frame_index) {
  if (state.ghost) accumulate(*state.ghost, frame1, frame2, frame_index);
  if (state.hbt) accumulate(*state.hbt, frame1, std::nullopt, frame_index);
  if (state.matrix) accumulate(*state.matrix, frame1, frame2, frame_index);
}

// Frames are dealt to workers one whole jackknife block at a time, so the
// per-block sums a worker produces are identical for any worker count and
// merging is order-free per bin.
template <typename PerFrame>
void sweep_blocks(std::size_t worker, std::size_t worker_count, std::uint64_t frames,
                  std::uint64_t block_length, PerFrame&& per_frame) {
  const std::uint64_t blocks = (frames + block_length - 1) / block_length;
  for (std::uint64_t b = worker; b < blocks; b += worker_count) {
    const std::uint64_t lo = b * block_length;
    const std::uint64_t hi = std::min(frames, lo + block_length);
    for (std::uint64_t f = lo; f < hi; ++f) per_frame(f);
  }
}

void run_workers(std::vector<WorkerState>& states, const std::function<void(std::size_t)>& body) {
  if (states.size() == 1) {
    body(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(states.size());
    for (std::size_t w = 0; w < states.size(); ++w) threads.emplace_back(body, w);
    for (auto& t : threads) t.join();
  }
}

std::exception_ptr first_error(const std::vector<WorkerState>& states) {
  for (const auto& s : states) {
    if (s.error) return s.error;
  }
  return nullptr;
}

RunOutcome assemble(ExperimentConfig cfg, const ModeFlags& flags,
                    std::vector<WorkerState>& states) {
  for (std::size_t w = 1; w < states.size(); ++w) {
    if (flags.ghost) merge(*states[0].ghost, *states[w].ghost);
    if (flags.hbt) merge(*states[0].hbt, *states[w].hbt);
    if (flags.matrix) merge(*states[0].matrix, *states[w].matrix);
  }
  RunOutcome out;
  out.frames = cfg.frames;
  out.config = std::move(cfg);
  auto take = [](std::optional<CorrelationAccumulator>& acc,
                 std::optional<CorrelationAccumulator>& slot,
                 std::optional<CorrelationProfile>& profile, std::vector<double>& error) {
    slot = std::move(acc);
    profile = finalize(*slot);
    try {
      error = estimate_statistical_error(*slot);
    } catch (const ValidationError&) {
      // too few frames or blocks to resample; the profile is still valid
    }
  };
  if (flags.ghost) take(states[0].ghost, out.ghost_acc, out.ghost, out.ghost_error);
  if (flags.hbt) take(states[0].hbt, out.hbt_acc, out.hbt, out.hbt_error);
  if (flags.matrix) {
    out.matrix_acc = std::move(states[0].matrix);
    out.matrix = finalize_matrix(*out.matrix_acc);
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

void check_numerical_guards(const ExperimentConfig& cfg) {
  const SampleGrid grid = make_grid(cfg.grid.n, cfg.grid.dx);
  const double extent = grid.extent();
  const double sigma = cfg.source.sigma;
  const double lambda = cfg.geom.lambda;
  const double min_feature = object_min_feature(cfg.object);
  const double aperture = object_aperture(cfg.object);
  // Transverse frequency content of the illumination at the mask: the
  // far-field correlation cone of a spot of diameter sigma seen at d1.
  const double illum_band = sigma / (2.0 * lambda * cfg.geom.d1);

  if (sigma > 0.9 * extent) {
    std::ostringstream msg;
    msg << "source spot diameter " << sigma << " m exceeds 90% of the grid extent " << extent
        << " m; enlarge the grid";
    throw NumericalGuardError(msg.str());
  }
  if (aperture > 0.5 * extent) {
    std::ostringstream msg;
    msg << "object aperture " << aperture << " m exceeds half the grid extent " << extent
        << " m; enlarge the grid";
    throw NumericalGuardError(msg.str());
  }
  const double usable_band = std::min(illum_band, 1.0 / (2.0 * grid.dx));
  if (usable_band < 4.5 / min_feature) {
    std::ostringstream msg;
    msg << "illumination band at the mask (" << usable_band
        << " /m, limited by the spot correlation cone and the sample pitch) cannot resolve the "
           "finest object feature of "
        << min_feature << " m; need at least " << 4.5 / min_feature << " /m";
    throw NumericalGuardError(msg.str());
  }
  const double detector_band = extent / (lambda * cfg.geom.d2);
  const double needed = illum_band + 6.0 / min_feature;
  if (detector_band < needed) {
    std::ostringstream msg;
    msg << "detector-plane bandwidth " << detector_band << " /m is below the " << needed
        << " /m the diffracted correlation occupies; periodic transform copies would fold into "
           "the measurement. Enlarge the grid or shrink the spot";
    throw NumericalGuardError(msg.str());
  }
}

RunOutcome run_ensemble(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (cfg.archive == ArchiveMode::read) {
    RunOutcome out = replay_archive_run(cfg.archive_path, cfg.mode, cfg.workers,
                                        cfg.block_length, cfg.matrix_bins);
    out.config.out_dir = cfg.out_dir;
    return out;
  }
  check_numerical_guards(cfg);

  const ModeFlags flags = flags_for(cfg.mode);
  const SampleGrid grid = make_grid(cfg.grid.n, cfg.grid.dx);
  const std::uint64_t block_length = effective_block_length(cfg);
  const std::size_t workers = cfg.workers;
  const auto t0 = std::chrono::steady_clock::now();

  std::string archive_path;
  std::unique_ptr<ArchiveWriter> writer;
  if (cfg.archive == ArchiveMode::write) {
    archive_path = cfg.archive_path.empty()
                       ? (std::filesystem::path(cfg.out_dir) / "frames.gsim").string()
                       : cfg.archive_path;
    writer = std::make_unique<ArchiveWriter>(archive_path, grid, flags.two_arms ? 2u : 1u,
                                             cfg.frames, cfg.seed);
  }

  std::vector<WorkerState> states(workers);
  std::vector<std::unique_ptr<TwoArmPropagator>> propagators;
  propagators.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    make_accumulators(states[w], flags, grid, block_length, cfg.matrix_bins);
    // Transform plans are created here, serially; workers only execute them.
    propagators.push_back(std::make_unique<TwoArmPropagator>(grid, cfg.object, cfg.geom));
  }

  auto body = [&](std::size_t w) {
    try {
      TwoArmPropagator& prop = *propagators[w];
      WorkerState& state = states[w];
      IntensityFrame frame1{grid, std::vector<double>(grid.n)};
      std::optional<IntensityFrame> frame2;
      if (flags.two_arms) frame2 = IntensityFrame{grid, std::vector<double>(grid.n)};
      sweep_blocks(w, workers, cfg.frames, block_length, [&](std::uint64_t f) {
        const RandomStream stream{cfg.seed, f};
        const ComplexField source = generate_realization(grid, cfg.source, stream);
        if (flags.two_arms) {
          prop.frame(source, frame1.values, frame2->values);
        } else {
          prop.frame_arm1(source, frame1.values);
        }
        fold_frame(state, frame1, frame2, f);
        if (writer) writer->write_frame(f, frame1, flags.two_arms ? &*frame2 : nullptr);
      });
    } catch (...) {
      states[w].error = std::current_exception();
    }
  };
  run_workers(states, body);

  if (std::exception_ptr err = first_error(states)) {
    if (writer) {
      try {
        writer->close();
      } catch (...) {
      }
      writer.reset();
      std::error_code ec;
      std::filesystem::remove(archive_path, ec); // half-written recording is useless
    }
    std::rethrow_exception(err);
  }
  if (writer) {
    try {
      writer->close();
    } catch (...) {
      writer.reset();
      std::error_code ec;
      std::filesystem::remove(archive_path, ec);
      throw;
    }
  }

  RunOutcome out = assemble(cfg, flags, states);
  out.wall_seconds = seconds_since(t0);
  return out;
}

RunOutcome replay_archive_run(const std::string& path, RunMode mode, std::size_t workers,
                              std::uint64_t block_length, std::size_t matrix_bins) {
  if (workers < 1 || workers > 256) throw ValidationError("workers must be in [1, 256]");
  const ArchiveHeader head = ArchiveReader(path).header(); // validates the whole file
  const ModeFlags flags = flags_for(mode);
  if (flags.two_arms && head.arm_count != 2) {
    throw ValidationError(std::string("archive holds a single detector; ") + to_string(mode) +
                          " pairing needs both: " + path);
  }
  if (flags.matrix && (matrix_bins < 1 || matrix_bins > head.grid.n)) {
    throw ValidationError("matrix_bins must lie in [1, grid_n]");
  }

  ExperimentConfig cfg; // geometry/source/object untouched: replay never propagates
  cfg.grid = head.grid;
  cfg.frames = head.frame_count;
  cfg.seed = head.seed;
  cfg.mode = mode;
  cfg.workers = workers;
  cfg.block_length = block_length;
  cfg.matrix_bins = matrix_bins;
  cfg.archive = ArchiveMode::read;
  cfg.archive_path = path;
  const std::uint64_t effective_blocks = effective_block_length(cfg);
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<WorkerState> states(workers);
  for (auto& s : states) make_accumulators(s, flags, head.grid, effective_blocks, matrix_bins);

  auto body = [&](std::size_t w) {
    try {
      ArchiveReader reader(path);
      WorkerState& state = states[w];
      IntensityFrame frame1{head.grid, {}};
      std::optional<IntensityFrame> frame2;
      if (head.arm_count == 2) frame2 = IntensityFrame{head.grid, {}};
      sweep_blocks(w, workers, head.frame_count, effective_blocks, [&](std::uint64_t f) {
        reader.read_frame(f, frame1, frame2 ? &*frame2 : nullptr);
        if (flags.two_arms) {
          fold_frame(state, frame1, frame2, f);
        } else {
          fold_frame(state, frame1, std::nullopt, f);
        }
      });
    } catch (...) {
      states[w].error = std::current_exception();
    }
  };
  run_workers(states, body);
  if (std::exception_ptr err = first_error(states)) std::rethrow_exception(err);

  RunOutcome out = assemble(cfg, flags, states);
  out.wall_seconds = seconds_since(t0);
  return out;
}

} // namespace gsim
