#include "gsim/random.hpp"

#include <cmath>

namespace gsim {

namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& x, const std::array<std::uint32_t, 2>& k) noexcept {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * x[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * x[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

// Two 32-bit words -> uniform double on [0,1) with 53 random bits.
inline double to_unit_double(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key) noexcept {
  std::array<std::uint32_t, 4> x = counter;
  std::array<std::uint32_t, 2> k = key;
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    round_once(x, k);
  }
  return x;
}

std::array<double, 2> RandomStream::normal_pair(std::uint64_t sample_index) const noexcept {
  const std::array<std::uint32_t, 4> counter = {
      static_cast<std::uint32_t>(frame_index),
      static_cast<std::uint32_t>(frame_index >> 32),
      static_cast<std::uint32_t>(sample_index),
      static_cast<std::uint32_t>(sample_index >> 32),
  };
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(seed),
      static_cast<std::uint32_t>(seed >> 32),
  };
  const auto w = philox4x32(counter, key);
  // u1 on (0,1] keeps the log finite; u2 on [0,1).
  const double u1 = to_unit_double(w[0], w[1]) + 0x1.0p-54;
  const double u2 = to_unit_double(w[2], w[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

double RandomStream::uniform(std::uint64_t sample_index, std::uint32_t lane) const noexcept {
  const std::array<std::uint32_t, 4> counter = {
      static_cast<std::uint32_t>(frame_index),
      static_cast<std::uint32_t>(frame_index >> 32),
      static_cast<std::uint32_t>(sample_index),
      0x80000000u | lane, // high bit separates the lane space from normal_pair counters
  };
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(seed),
      static_cast<std::uint32_t>(seed >> 32),
  };
  const auto w = philox4x32(counter, key);
  return to_unit_double(w[0], w[1]);
}

} // namespace gsim
