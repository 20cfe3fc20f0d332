#pragma once

#include "gsim/grid.hpp"

#include <cstddef>
#include <vector>

namespace gsim {

/// Least-squares scale s minimizing sum((s*sample - reference)^2).
double fit_scale(const std::vector<double>& sample, const std::vector<double>& reference);

/// Root-mean-square difference of two equal-length curves.
double rmse(const std::vector<double>& a, const std::vector<double>& b);

/// Pearson correlation coefficient of two equal-length curves.
double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b);

struct PeakEstimate {
  double position = 0.0;
  double value = 0.0;
};

/// Location of the largest sample in [lo, hi), refined by a least-squares
/// quadratic over up to half_window bins on each side of it. Falls back to
/// the raw sample when the fit has no interior maximum.
PeakEstimate refine_peak(const std::vector<double>& axis, const std::vector<double>& values,
                         std::size_t lo, std::size_t hi, std::size_t half_window);

/// All local maxima in [lo, hi) at least `floor` high, largest first.
std::vector<PeakEstimate> local_maxima(const std::vector<double>& axis,
                                       const std::vector<double>& values, std::size_t lo,
                                       std::size_t hi, double floor);

/// Mean of values[j] * e^{-i 2 pi f x[j]} over samples with |x| <=
/// window_half_width: the complex fringe amplitude of a profile at one
/// spatial frequency.
cplx fourier_coefficient(const std::vector<double>& axis, const std::vector<double>& values,
                         double frequency, double window_half_width);

/// Jackknife standard error of a scalar statistic from its delete-one
/// values: sqrt((B-1)/B * sum (th_b - mean)^2).
double jackknife_se(const std::vector<double>& delete_one);

} // namespace gsim
