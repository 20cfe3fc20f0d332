#include "gsim/metrics.hpp"

#include "gsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gsim {

namespace {

void check_pair(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw ValidationError("curves must be nonempty and equally long");
  }
}

} // namespace

double fit_scale(const std::vector<double>& sample, const std::vector<double>& reference) {
  check_pair(sample, reference);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    num += sample[i] * reference[i];
    den += sample[i] * sample[i];
  }
  if (den == 0.0) throw ValidationError("cannot scale an identically zero curve");
  return num / den;
}

double rmse(const std::vector<double>& a, const std::vector<double>& b) {
  check_pair(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(a.size()));
}

double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  check_pair(a, b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) {
    throw ValidationError("correlation undefined for a constant curve");
  }
  return sab / std::sqrt(saa * sbb);
}

PeakEstimate refine_peak(const std::vector<double>& axis, const std::vector<double>& values,
                         std::size_t lo, std::size_t hi, std::size_t half_window) {
  check_pair(axis, values);
  hi = std::min(hi, values.size());
  if (lo >= hi) throw ValidationError("empty peak search range");
  std::size_t arg = lo;
  for (std::size_t i = lo; i < hi; ++i) {
    if (values[i] > values[arg]) arg = i;
  }
  const std::size_t wlo = (arg > lo + half_window) ? arg - half_window : lo;
  const std::size_t whi = std::min(arg + half_window + 1, hi);
  if (whi - wlo < 3) return {axis[arg], values[arg]};

  // Least-squares parabola v = c0 + c1 u + c2 u^2 in u = x - x[arg].
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
  for (std::size_t i = wlo; i < whi; ++i) {
    const double u = axis[i] - axis[arg];
    const double u2 = u * u;
    s0 += 1.0;
    s1 += u;
    s2 += u2;
    s3 += u2 * u;
    s4 += u2 * u2;
    t0 += values[i];
    t1 += values[i] * u;
    t2 += values[i] * u2;
  }
  // Cramer's rule on the 3x3 normal equations.
  const double det = s0 * (s2 * s4 - s3 * s3) - s1 * (s1 * s4 - s2 * s3) + s2 * (s1 * s3 - s2 * s2);
  if (det == 0.0) return {axis[arg], values[arg]};
  const double c0 =
      (t0 * (s2 * s4 - s3 * s3) - s1 * (t1 * s4 - t2 * s3) + s2 * (t1 * s3 - t2 * s2)) / det;
  const double c1 =
      (s0 * (t1 * s4 - t2 * s3) - t0 * (s1 * s4 - s2 * s3) + s2 * (s1 * t2 - s2 * t1)) / det;
  const double c2 =
      (s0 * (s2 * t2 - s3 * t1) - s1 * (s1 * t2 - s3 * t0) + t0 * (s1 * s3 - s2 * s2)) / det;
  if (!(c2 < 0.0)) return {axis[arg], values[arg]};
  const double u_star = -c1 / (2.0 * c2);
  const double reach = axis[whi - 1] - axis[wlo];
  if (std::abs(u_star) > reach) return {axis[arg], values[arg]};
  return {axis[arg] + u_star, c0 + c1 * u_star + c2 * u_star * u_star};
}

std::vector<PeakEstimate> local_maxima(const std::vector<double>& axis,
                                       const std::vector<double>& values, std::size_t lo,
                                       std::size_t hi, double floor) {
  check_pair(axis, values);
  hi = std::min(hi, values.size());
  std::vector<PeakEstimate> peaks;
  for (std::size_t i = std::max<std::size_t>(lo, 1) ; i + 1 < hi; ++i) {
    if (values[i] >= floor && values[i] > values[i - 1] && values[i] >= values[i + 1]) {
      peaks.push_back({axis[i], values[i]});
    }
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const PeakEstimate& a, const PeakEstimate& b) { return a.value > b.value; });
  return peaks;
}

cplx fourier_coefficient(const std::vector<double>& axis, const std::vector<double>& values,
                         double frequency, double window_half_width) {
  check_pair(axis, values);
  cplx sum(0.0, 0.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (std::abs(axis[i]) > window_half_width) continue;
    sum += values[i] * std::polar(1.0, -2.0 * std::numbers::pi * frequency * axis[i]);
    ++count;
  }
  if (count == 0) throw ValidationError("fringe window contains no samples");
  return sum / static_cast<double>(count);
}

double jackknife_se(const std::vector<double>& delete_one) {
  if (delete_one.size() < 2) {
    throw ValidationError("jackknife needs at least two delete-one values");
  }
  const double b = static_cast<double>(delete_one.size());
  double mean = 0.0;
  for (double v : delete_one) mean += v;
  mean /= b;
  double ss = 0.0;
  for (double v : delete_one) ss += (v - mean) * (v - mean);
  return std::sqrt(ss * (b - 1.0) / b);
}

} // namespace gsim
