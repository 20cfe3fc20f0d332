#pragma once

#include "gsim/grid.hpp"
#include "gsim/optics.hpp"
#include "gsim/source.hpp"

#include <cstdint>
#include <vector>

namespace gsim {

enum class AnalyticFormula {
  ghost_phase_grating, // |FT of t|^2 at the doubled-frequency mapping
  hbt_aperture,        // |FT of |t|^2|^2 at the same mapping
  fraunhofer_custom,   // same integrals for a non-grating object
};

/// Closed-form reference curve. Values are nonnegative and scaled so the
/// largest sample on the axis equals 1.
struct AnalyticCurve {
  std::vector<double> axis;   // meters
  std::vector<double> values; // unit peak
  AnalyticFormula formula = AnalyticFormula::fraunhofer_custom;
};

/// Fourier transform of a piecewise-constant transmittance at ordinary
/// frequency nu (cycles per meter), by exact per-segment integrals:
/// each [lo, hi) segment contributes t * len * e^{-i 2 pi nu mid} *
/// sinc(nu len). No sampling, no transform grid — this is the arbiter
/// the propagation path is tested against.
cplx transform_value(const std::vector<Segment>& segments, double nu);

/// |transform_value|^2 (units m^2).
double transform_power(const std::vector<Segment>& segments, double nu);

/// Correlation fringe pattern on the back-to-back slice: |FT of t|^2 at
/// nu = 2 x / (lambda d2) — the object's Fraunhofer pattern at half the
/// illumination wavelength — evaluated on the axis grid and scaled to
/// unit peak.
AnalyticCurve analytic_ghost_profile(const ObjectSpec& object, const ArmGeometry& geom,
                                     const SampleGrid& axis);

/// Single-arm counterpart: |FT of |t|^2|^2 at the same frequency
/// mapping. Depends only on the modulus of t, so any pure phase pattern
/// collapses to its aperture box.
AnalyticCurve analytic_hbt_profile(const ObjectSpec& object, const ArmGeometry& geom,
                                   const SampleGrid& axis);

/// Closed form for the five-zone grating with pi phase zones:
/// sinc^2(a nu) * [1 - 2 cos(2 pi a nu) + c2 * cos(4 pi a nu)]^2 at
/// nu = 2 x / (lambda d2), unit peak. Expanding the five-zone Fourier
/// sum gives c2 = 2 (and the bracket equals 1 at nu = 0, consistent with
/// the zones integrating to one zone width); c2 = 4 is kept selectable
/// as a diagnostic variant so the discrepancy against transform_value
/// can be demonstrated rather than assumed.
AnalyticCurve closed_form_grating_profile(const ObjectSpec& object, const ArmGeometry& geom,
                                          const SampleGrid& axis,
                                          double second_harmonic_coefficient);

/// Intensity-covariance prediction at one detector pair (x1 on the
/// object arm, x2 on the reference arm) by direct quadrature of
///   | integral over the source of S(x) h1*(x1, x) h2(x2, x) dx |^2
/// with the printed impulse responses: h2 a single quadratic-phase
/// kernel over d with amplitude 1/(lambda d); h1 the object-plane
/// integral of the d1 and d2 kernels (amplitudes 1/(lambda d1),
/// 1/(lambda d2)) around the transmittance. S is the delta-correlated
/// source's mean intensity profile. Both integrals use composite
/// Simpson rules refined until the fastest local chirp is sampled
/// twelve steps per period; small_grid fixes the source-plane cell
/// width and must span the spot.
///
/// Everything here is deliberately independent of the transform-based
/// propagation path: no FFTs, no shared discretization, no ensemble.
/// The returned value carries the kernels' constant amplitudes, so only
/// ratios/shapes are meaningful against the Monte-Carlo estimate.
double quadrature_delta_i(const ObjectSpec& object, const ArmGeometry& geom,
                          const SourceSpec& source, const SampleGrid& small_grid, double x1,
                          double x2);

/// quadrature_delta_i along the back-to-back slice (x1 = x, x2 = -x for
/// each x in points), with node lattices built once for the whole scan.
std::vector<double> quadrature_ghost_slice(const ObjectSpec& object, const ArmGeometry& geom,
                                           const SourceSpec& source,
                                           const SampleGrid& small_grid,
                                           const std::vector<double>& points);

/// Desk-scale configuration for the quadrature cross-check: the default
/// experiment with every physical length scaled by 0.1, a Monte-Carlo
/// grid just large enough to hold the scaled spot, and a 128-cell
/// source-plane quadrature grid.
struct MiniaturePreset {
  ArmGeometry geom;
  ObjectSpec object;
  SourceSpec source;
  SampleGrid mc_grid;         // ensemble propagation grid
  SampleGrid quadrature_grid; // small_grid for quadrature_delta_i
  std::uint64_t frames = 0;
};

MiniaturePreset miniature_preset();

} // namespace gsim
