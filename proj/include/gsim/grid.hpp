#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace gsim {

using cplx = std::complex<double>;

/// Centered 1-D sample grid shared by every plane of the simulation.
/// n is a power of two so transform-based propagation needs no padding
/// logic; the coordinate of sample i is x[i] = (i - n/2) * dx, which puts
/// x[n/2] = 0 and pairs x[i] with x[n - i] = -x[i] for every i > 0
/// (sample 0 has no mirror partner).
struct SampleGrid {
  std::size_t n = 0;
  double dx = 0.0; // sample pitch, meters

  [[nodiscard]] double coord(std::size_t i) const noexcept {
    return (static_cast<double>(i) - static_cast<double>(n / 2)) * dx;
  }
  [[nodiscard]] double extent() const noexcept { return static_cast<double>(n) * dx; }
  /// Index of the mirrored coordinate -x[i]; valid for i in [1, n-1].
  [[nodiscard]] std::size_t mirror_index(std::size_t i) const noexcept { return n - i; }

  bool operator==(const SampleGrid&) const = default;
};

/// Complex field samples on a SampleGrid.
struct ComplexField {
  SampleGrid grid;
  std::vector<cplx> values;
};

/// Non-negative detector intensities on a SampleGrid.
struct IntensityFrame {
  SampleGrid grid;
  std::vector<double> values;
};

/// Build a centered grid. n must be a power of two >= 8 and dx > 0.
SampleGrid make_grid(std::size_t n, double dx);

/// All coordinates of a grid, in sample order.
std::vector<double> grid_coords(const SampleGrid& grid);

/// |E|^2 per sample. The sum of the result times nothing (plain sum) equals
/// the squared 2-norm of the field values.
IntensityFrame intensity_of(const ComplexField& field);

} // namespace gsim
