#pragma once

#include "gsim/grid.hpp"
#include "gsim/optics.hpp"
#include "gsim/source.hpp"

#include <cstdint>
#include <string>

namespace gsim {

enum class RunMode { ghost, hbt, both, full_matrix };

enum class ArchiveMode { none, write, read };

/// Everything a run needs, with the published experiment as defaults:
/// 0.532 um light, 60 + 75 mm arms against a 135 mm reference arm, a
/// 3 mm thermal spot, the five-zone pi-phase grating, 10,000 frames on a
/// 4096 x 1 um grid.
struct ExperimentConfig {
  ArmGeometry geom;
  SourceSpec source;
  ObjectSpec object;
  SampleGrid grid{4096, 1.0e-6};
  std::uint64_t frames = 10'000;
  std::uint64_t seed = 1;
  RunMode mode = RunMode::ghost;
  std::string out_dir = "out";
  ArchiveMode archive = ArchiveMode::none;
  std::string archive_path; // read source, or write destination override
  std::size_t workers = 1;
  std::uint64_t block_length = 0; // 0: frames / 50, at least 1
  std::size_t matrix_bins = 128;
};

/// Jackknife block length actually used by a run.
std::uint64_t effective_block_length(const ExperimentConfig& cfg);

/// Parse flat `key = value` lines ('#' comments, blank lines ignored).
/// Unknown keys, duplicate keys, malformed values, and out-of-range
/// values are rejected naming the offending line. `origin` labels error
/// messages (usually the file path).
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "config");

/// parse_config over a file's contents. Missing/unreadable file throws
/// IoError.
ExperimentConfig load_config(const std::string& path);

/// Cross-field checks: positive dimensions, power-of-two grid, frame
/// minimum, and the back-to-back arm condition d = d1 + d2 for the
/// ghost pairings. Throws ValidationError; called by parse_config and by
/// anything that builds a config programmatically.
void validate_config(const ExperimentConfig& cfg);

const char* to_string(RunMode mode) noexcept;

} // namespace gsim
