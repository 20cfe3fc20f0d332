#pragma once

#include "gsim/grid.hpp"

#include <cstdint>
#include <fstream>
#include <mutex>
#include <string>

namespace gsim {

/// Fixed-layout binary container for recorded detector frames, so a run can
/// be replayed (e.g. re-correlated in a different pairing mode) without
/// regenerating the ensemble.
///
/// Layout (little-endian throughout):
///   bytes 0..4   magic "GSIM1"
///   u64          grid sample count n
///   f64          grid pitch dx (meters)
///   u32          arm count (1 or 2)
///   u64          frame count
///   u64          ensemble seed
///   payload      frame-major: arm-1 row of n f64, then (if 2 arms) arm-2 row
struct ArchiveHeader {
  SampleGrid grid;
  std::uint32_t arm_count = 0;
  std::uint64_t frame_count = 0;
  std::uint64_t seed = 0;
};

/// Random-access frame writer. write_frame is thread-safe: frames may arrive
/// in any order from any number of workers, and the file contents depend only
/// on the (frame_index -> data) mapping, never on arrival order.
class ArchiveWriter {
public:
  ArchiveWriter(const std::string& path, const SampleGrid& grid, std::uint32_t arm_count,
                std::uint64_t frame_count, std::uint64_t seed);
  ~ArchiveWriter();

  ArchiveWriter(const ArchiveWriter&) = delete;
  ArchiveWriter& operator=(const ArchiveWriter&) = delete;

  void write_frame(std::uint64_t frame_index, const IntensityFrame& arm1,
                   const IntensityFrame* arm2 = nullptr);

  /// Flush and close; throws IoError if anything failed to reach the file.
  void close();

  [[nodiscard]] const ArchiveHeader& header() const noexcept { return m_header; }
  [[nodiscard]] const std::string& path() const noexcept { return m_path; }

private:
  ArchiveHeader m_header;
  std::string m_path;
  std::ofstream m_file;
  std::mutex m_mutex;
  bool m_open = false;
};

/// Validating frame reader. Not thread-safe; give each worker its own.
class ArchiveReader {
public:
  explicit ArchiveReader(const std::string& path);

  [[nodiscard]] const ArchiveHeader& header() const noexcept { return m_header; }

  /// Reads one frame into caller-provided frames (grids are overwritten).
  /// arm2 must be null iff the archive holds a single arm.
  void read_frame(std::uint64_t frame_index, IntensityFrame& arm1,
                  IntensityFrame* arm2 = nullptr);

private:
  ArchiveHeader m_header;
  std::string m_path;
  std::ifstream m_file;
};

} // namespace gsim
