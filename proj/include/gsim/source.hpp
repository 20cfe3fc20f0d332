#pragma once

#include "gsim/grid.hpp"
#include "gsim/random.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace gsim {

enum class SpotEnvelope {
  hard,     // unit amplitude inside |x| <= sigma/2, zero outside
  gaussian, // amplitude exp(-4 x^2 / sigma^2): 1/e^2 intensity diameter = sigma
};

/// Pseudothermal source: per-sample circular complex Gaussian field,
/// delta-correlated between samples, truncated to a spot of diameter
/// sigma. mean_intensity is the ensemble mean of |E|^2 at the spot
/// center.
struct SourceSpec {
  double mean_intensity = 1.0;
  double sigma = 3.0e-3; // spot diameter, meters
  SpotEnvelope envelope = SpotEnvelope::hard;
};

/// One speckle realization. Sample i draws its (Re, Im) pair from the
/// counter (stream.seed, stream.frame_index, i), so a frame is bitwise
/// identical no matter which worker generates it or in what order.
ComplexField generate_realization(const SampleGrid& grid, const SourceSpec& spec,
                                  const RandomStream& stream);

/// Amplitude envelope of the spec at position x (sqrt of the intensity
/// envelope, before the mean_intensity scale).
double spot_amplitude(const SourceSpec& spec, double x) noexcept;

struct PairCorrelation {
  std::size_t i = 0;
  std::size_t j = 0;
  cplx correlation;      // ensemble mean of conj(E_i) * E_j
  double standard_error; // scale of that mean under the null (independent samples)
};

/// First and second moments of an ensemble of realizations.
struct MomentReport {
  std::vector<cplx> mean_field;        // per-sample mean of E
  std::vector<double> mean_intensity;  // per-sample mean of |E|^2
  std::vector<PairCorrelation> pairs;  // requested off-diagonal correlations
  std::size_t count = 0;
};

/// Ensemble moments over >= 100 realizations sharing one grid.
/// pairs selects which off-diagonal correlations to report.
MomentReport ensemble_statistics(const std::vector<ComplexField>& fields,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

/// Streaming spatially-averaged field and intensity autocorrelation,
/// used to measure coherence widths and speckle sizes. Lag L accumulates
/// conj(E(x)) E(x + L dx) and dI(x) dI(x + L dx) over a central window.
class SpatialCoherenceAccumulator {
public:
  SpatialCoherenceAccumulator(const SampleGrid& grid, std::size_t max_lag, std::size_t window);

  void add(const ComplexField& field);

  /// Re <conj(E(x)) E(x + lag)> normalized to lag 0 — signed, so zero
  /// crossings of the underlying coherence function survive.
  [[nodiscard]] std::vector<double> field_correlation() const;
  /// <dI(x) dI(x + lag)> normalized to lag 0, dI = I - <I>.
  [[nodiscard]] std::vector<double> intensity_correlation() const;

  [[nodiscard]] std::size_t count() const noexcept { return m_count; }

private:
  SampleGrid m_grid;
  std::size_t m_max_lag;
  std::size_t m_lo; // window start index
  std::size_t m_hi; // window end index (exclusive, before lag shift)
  std::vector<cplx> m_field_sum;
  std::vector<double> m_ii_sum;  // sum of I(x) I(x+lag)
  std::vector<double> m_i_sum;   // sum of I(x) over the window
  std::vector<double> m_is_sum;  // sum of I(x+lag)
  std::size_t m_count = 0;
};

/// Linearly interpolated first zero crossing of a correlation curve
/// sampled at multiples of dx; returns the lag in meters. Throws
/// NumericalGuardError if the curve never crosses zero.
double first_zero_crossing(const std::vector<double>& curve, double dx);

} // namespace gsim
