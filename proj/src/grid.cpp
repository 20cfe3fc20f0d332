#include "gsim/grid.hpp"

#include "gsim/errors.hpp"

#include <string>

namespace gsim {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

} // namespace

SampleGrid make_grid(std::size_t n, double dx) {
  if (!is_power_of_two(n) || n < 8) {
    throw ValidationError("grid size must be a power of two >= 8, got " + std::to_string(n));
  }
  if (!(dx > 0.0)) {
    throw ValidationError("grid pitch dx must be positive, got " + std::to_string(dx));
  }
  return SampleGrid{n, dx};
}

std::vector<double> grid_coords(const SampleGrid& grid) {
  std::vector<double> xs(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) xs[i] = grid.coord(i);
  return xs;
}

IntensityFrame intensity_of(const ComplexField& field) {
  if (field.values.size() != field.grid.n) {
    throw ValidationError("field sample count does not match its grid");
  }
  IntensityFrame frame{field.grid, std::vector<double>(field.grid.n)};
  for (std::size_t i = 0; i < field.grid.n; ++i) frame.values[i] = std::norm(field.values[i]);
  return frame;
}

} // namespace gsim
