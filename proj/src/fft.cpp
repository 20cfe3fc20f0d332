#include "gsim/fft.hpp"

#include "gsim/errors.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace gsim::fft {

namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

// Plan creation is not thread-safe in FFTW; the cache lock also serializes
// it. fftw_execute_dft on distinct buffers is safe without the lock.
// FFTW_UNALIGNED lets the plans run on whatever buffers std::vector hands us.
PlanPair& plans_for(std::size_t n) {
  static std::mutex lock;
  static std::map<std::size_t, PlanPair> cache;
  std::scoped_lock guard(lock);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<cplx> probe(n);
  auto* raw = reinterpret_cast<fftw_complex*>(probe.data());
  PlanPair pair;
  pair.fwd = fftw_plan_dft_1d(static_cast<int>(n), raw, raw, FFTW_FORWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  pair.bwd = fftw_plan_dft_1d(static_cast<int>(n), raw, raw, FFTW_BACKWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (pair.fwd == nullptr || pair.bwd == nullptr) {
    throw NumericalGuardError("FFTW failed to plan a transform of size " + std::to_string(n));
  }
  return cache.emplace(n, pair).first->second;
}

} // namespace

void forward(std::vector<cplx>& data) {
  auto& plans = plans_for(data.size());
  auto* raw = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans.fwd, raw, raw);
}

void inverse(std::vector<cplx>& data) {
  auto& plans = plans_for(data.size());
  auto* raw = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans.bwd, raw, raw);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= scale;
}

double bin_frequency(std::size_t m, std::size_t n, double dx) noexcept {
  const auto half = n / 2;
  const double k = (m < half) ? static_cast<double>(m)
                              : static_cast<double>(m) - static_cast<double>(n);
  return k / (static_cast<double>(n) * dx);
}

} // namespace gsim::fft
