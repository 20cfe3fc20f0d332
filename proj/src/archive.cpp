#include "gsim/archive.hpp"

#include "gsim/errors.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <sstream>

namespace gsim {

namespace {

constexpr char kMagic[5] = {'G', 'S', 'I', 'M', '1'};
constexpr std::uint64_t kHeaderBytes = 5 + 8 + 8 + 4 + 8 + 8;

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

std::uint32_t take_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t take_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double take_f64(std::istream& in) {
  const std::uint64_t bits = take_u64(in);
  double v = 0.0;
  std::memcpy(&v, &bits, 8);
  return v;
}

std::uint64_t row_bytes(const ArchiveHeader& h) { return h.grid.n * 8; }
std::uint64_t frame_bytes(const ArchiveHeader& h) { return row_bytes(h) * h.arm_count; }

std::uint64_t frame_offset(const ArchiveHeader& h, std::uint64_t frame_index) {
  return kHeaderBytes + frame_index * frame_bytes(h);
}

void write_row(std::ostream& out, const std::vector<double>& values) {
  // Little-endian host: the vector's bytes are already the file layout.
  static_assert(sizeof(double) == 8);
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * 8));
}

} // namespace

ArchiveWriter::ArchiveWriter(const std::string& path, const SampleGrid& grid,
                             std::uint32_t arm_count, std::uint64_t frame_count,
                             std::uint64_t seed)
    : m_header{grid, arm_count, frame_count, seed}, m_path(path) {
  if (arm_count != 1 && arm_count != 2) {
    throw ValidationError("archive arm count must be 1 or 2");
  }
  if (grid.n == 0 || frame_count == 0) {
    throw ValidationError("archive needs a nonempty grid and at least one frame");
  }
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  m_file.open(path, std::ios::binary | std::ios::trunc);
  if (!m_file) throw IoError("cannot create archive: " + path);
  m_file.write(kMagic, 5);
  put_u64(m_file, grid.n);
  put_f64(m_file, grid.dx);
  put_u32(m_file, arm_count);
  put_u64(m_file, frame_count);
  put_u64(m_file, seed);
  if (!m_file) throw IoError("failed writing archive header: " + path);
  m_open = true;
}

ArchiveWriter::~ArchiveWriter() {
  if (m_open) {
    m_file.close(); // destructor path: best effort, no throwing
  }
}

void ArchiveWriter::write_frame(std::uint64_t frame_index, const IntensityFrame& arm1,
                                const IntensityFrame* arm2) {
  if (!m_open) throw IoError("archive already closed: " + m_path);
  if (frame_index >= m_header.frame_count) {
    throw ValidationError("archive frame index out of range");
  }
  const bool want_two = m_header.arm_count == 2;
  if (want_two != (arm2 != nullptr)) {
    throw ValidationError("archive arm count mismatch on write");
  }
  if (arm1.grid != m_header.grid || (arm2 && arm2->grid != m_header.grid)) {
    throw ValidationError("archive frame grid mismatch on write");
  }
  std::lock_guard<std::mutex> lock(m_mutex);
  m_file.seekp(static_cast<std::streamoff>(frame_offset(m_header, frame_index)));
  write_row(m_file, arm1.values);
  if (arm2) write_row(m_file, arm2->values);
  if (!m_file) throw IoError("failed writing frame to archive: " + m_path);
}

void ArchiveWriter::close() {
  if (!m_open) return;
  m_open = false;
  m_file.flush();
  if (!m_file) throw IoError("failed flushing archive: " + m_path);
  m_file.close();
  if (m_file.fail()) throw IoError("failed closing archive: " + m_path);
}

ArchiveReader::ArchiveReader(const std::string& path) : m_path(path) {
  m_file.open(path, std::ios::binary);
  if (!m_file) throw IoError("cannot open archive: " + path);

  char magic[5] = {};
  m_file.read(magic, 5);
  if (!m_file || std::memcmp(magic, kMagic, 5) != 0) {
    throw IoError("not a frame archive (bad magic): " + path);
  }
  const std::uint64_t n = take_u64(m_file);
  const double dx = take_f64(m_file);
  const std::uint32_t arms = take_u32(m_file);
  const std::uint64_t frames = take_u64(m_file);
  const std::uint64_t seed = take_u64(m_file);
  if (!m_file) throw IoError("truncated archive header: " + path);
  if (arms != 1 && arms != 2) throw IoError("archive arm count must be 1 or 2: " + path);
  if (frames == 0) throw IoError("archive holds no frames: " + path);
  if (!(dx > 0.0) || !std::isfinite(dx)) throw IoError("archive grid pitch invalid: " + path);
  SampleGrid grid;
  try {
    grid = make_grid(static_cast<std::size_t>(n), dx);
  } catch (const ValidationError& e) {
    throw IoError("archive grid invalid: " + std::string(e.what()));
  }
  m_header = ArchiveHeader{grid, arms, frames, seed};

  m_file.seekg(0, std::ios::end);
  const auto actual = static_cast<std::uint64_t>(m_file.tellg());
  const std::uint64_t expected = kHeaderBytes + frames * frame_bytes(m_header);
  if (actual != expected) {
    const std::uint64_t payload = actual > kHeaderBytes ? actual - kHeaderBytes : 0;
    std::ostringstream msg;
    msg << "archive truncated or padded: header promises " << frames << " frames ("
        << expected << " bytes) but the file holds " << payload / frame_bytes(m_header)
        << " complete frames (" << actual << " bytes): " << path;
    throw IoError(msg.str());
  }
}

void ArchiveReader::read_frame(std::uint64_t frame_index, IntensityFrame& arm1,
                               IntensityFrame* arm2) {
  if (frame_index >= m_header.frame_count) {
    throw ValidationError("archive frame index out of range");
  }
  const bool want_two = m_header.arm_count == 2;
  if (want_two != (arm2 != nullptr)) {
    throw ValidationError(want_two ? "archive holds two arms; caller asked for one"
                                   : "archive holds one arm; caller asked for two");
  }
  m_file.seekg(static_cast<std::streamoff>(frame_offset(m_header, frame_index)));
  auto read_row = [&](IntensityFrame& frame) {
    frame.grid = m_header.grid;
    frame.values.resize(m_header.grid.n);
    m_file.read(reinterpret_cast<char*>(frame.values.data()),
                static_cast<std::streamsize>(frame.values.size() * 8));
    if (!m_file) throw IoError("failed reading frame from archive: " + m_path);
    for (double v : frame.values) {
      if (!std::isfinite(v) || v < 0.0) {
        throw IoError("archive frame holds a non-physical intensity: " + m_path);
      }
    }
  };
  read_row(arm1);
  if (arm2) read_row(*arm2);
}

} // namespace gsim
