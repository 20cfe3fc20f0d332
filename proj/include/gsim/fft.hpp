#pragma once

#include "gsim/grid.hpp"

#include <cstddef>
#include <vector>

namespace gsim {

/// Unnormalized DFT pair backed by FFTW. Plans are cached per size and
/// created under a lock; execution on caller buffers is thread-safe, so
/// worker threads can transform concurrently. Plans use FFTW_ESTIMATE,
/// which picks the same algorithm every run and keeps results
/// reproducible across processes.
///
/// forward:  X[m] = sum_i x[i] * exp(-2*pi*i*m*i/n)
/// inverse:  x[i] = (1/n) * sum_m X[m] * exp(+2*pi*i*m*i/n)   (normalized)
namespace fft {

void forward(std::vector<cplx>& data);
void inverse(std::vector<cplx>& data);

/// DFT frequency of bin m on an n-point grid with pitch dx, in cycles per
/// meter: m and m-n alias, the smaller magnitude wins (standard wrap).
double bin_frequency(std::size_t m, std::size_t n, double dx) noexcept;

} // namespace fft

} // namespace gsim
