#pragma once

#include "gsim/grid.hpp"

#include <cstddef>
#include <vector>

namespace gsim {

/// One constant-valued interval of a piecewise transmittance, covering
/// [lo, hi) in meters around the optical axis.
struct Segment {
  double lo = 0.0;
  double hi = 0.0;
  cplx t{0.0, 0.0};
};

enum class ObjectKind {
  phase_grating, // five zones of width zone_width, phases [0, phi, 0, phi, 0]
  double_slit,   // two unit slits, center-to-center slit_separation
  open_aperture, // t = 1 across total_aperture
  opaque_edge,   // t = 1 from edge_position to the aperture's right edge
  piecewise,     // explicit segments
};

/// Thin transmittance mask centered on the axis; t = 0 outside its
/// segments. The grating's phase step comes from etch depth:
/// phi = 2 pi (refractive_index - 1) groove_depth / lambda.
struct ObjectSpec {
  ObjectKind kind = ObjectKind::phase_grating;
  double zone_width = 150.0e-6;
  double groove_depth = 0.47e-6;
  double refractive_index = 1.57;
  double slit_width = 0.0;
  double slit_separation = 0.0;
  double edge_position = 0.0;
  double total_aperture = 0.0; // 0 = derive from the kind's own widths
  std::vector<Segment> segments; // piecewise only
};

/// Distances of the two-arm layout, meters. Arm 1: source -> d1 -> object
/// -> d2 -> detector 1. Arm 2: source -> d -> detector 2. Intensity
/// correlations image the object's Fourier transform only on the
/// back-to-back surface d = d1 + d2.
struct ArmGeometry {
  double lambda = 0.532e-6;
  double d1 = 60.0e-3;
  double d2 = 75.0e-3;
  double d = 135.0e-3;
};

/// Phase step of an etched groove at the given wavelength.
double grating_phase(double lambda, double groove_depth, double refractive_index) noexcept;

/// The object's segments, resolved at a wavelength (the grating phase
/// depends on it). Segments are sorted, non-overlapping, and centered.
std::vector<Segment> object_segments(const ObjectSpec& object, double lambda);

/// Full width of the transmitting region.
double object_aperture(const ObjectSpec& object);

/// Smallest structural length of the mask; grids must resolve it.
double object_min_feature(const ObjectSpec& object);

/// Sample the mask on a grid. Requires object_min_feature >= 8 dx and the
/// aperture to fit inside the grid extent.
std::vector<cplx> transmittance(const ObjectSpec& object, const SampleGrid& grid, double lambda);

/// Paraxial free-space step of the convolution kernel
/// exp(-i k d) / sqrt(-i lambda d) * exp(-i pi (x - x')^2 / (lambda d)),
/// normalized so the continuum step is unitary (the textbook 1/(i
/// lambda d) prefactor differs only by a global constant, and every
/// downstream observable is a normalized shape). Short steps (lambda*d
/// up to the grid area n*dx^2, twice that after padding) run as the
/// unit-modulus transfer function exp(-i k d + i pi lambda d nu^2);
/// longer ones run as an exact zero-padded linear convolution with the
/// sampled kernel, whose chirp is resolved everywhere precisely when the
/// transfer function is not. Light leaving the grid window is truncated
/// on long steps, as in free space -- there is no periodic wrap-around.
ComplexField fresnel_kernel_apply(const ComplexField& field, double distance, double lambda);

/// DFT-frequency samples of the transfer function for one step. Only
/// below its Nyquist rate for lambda*d <= n*dx^2; the kernel-apply entry
/// point picks the sound method per step, so prefer it over using the
/// raw symbol.
std::vector<cplx> fresnel_symbol(const SampleGrid& grid, double distance, double lambda);

/// Object arm: d1 to the mask, multiply, d2 to detector 1.
ComplexField propagate_arm1(const ComplexField& source_field, const std::vector<cplx>& mask,
                            const ArmGeometry& geom);
ComplexField propagate_arm1(const ComplexField& source_field, const ObjectSpec& object,
                            const ArmGeometry& geom);

/// Reference arm: straight run over d to detector 2.
ComplexField propagate_arm2(const ComplexField& source_field, const ArmGeometry& geom);

/// Coherent 2f Fraunhofer reference: |FT of t|^2 mapped to the focal
/// plane as x = lambda f nu. The mask is sampled on `grid`, zero-padded
/// by pad_factor for focal-plane resolution; the returned frame carries
/// its own focal-plane grid.
IntensityFrame fraunhofer_2f_reference(const ObjectSpec& object, double lambda,
                                       double focal_length, const SampleGrid& grid,
                                       std::size_t pad_factor = 4);

/// Precomputed two-arm pipeline for ensemble loops: the step multipliers
/// and the sampled mask are built once, and frame() reuses scratch
/// buffers. Instances are not thread-safe; give each worker its own.
class TwoArmPropagator {
public:
  TwoArmPropagator(const SampleGrid& grid, const ObjectSpec& object, const ArmGeometry& geom);

  /// Intensities at both detectors for one source realization.
  void frame(const ComplexField& source_field, std::vector<double>& intensity1,
             std::vector<double>& intensity2);

  /// Arm-1 intensity only (single-arm runs skip the reference transform).
  void frame_arm1(const ComplexField& source_field, std::vector<double>& intensity1);

  [[nodiscard]] const SampleGrid& grid() const noexcept { return m_grid; }
  [[nodiscard]] const std::vector<cplx>& mask() const noexcept { return m_mask; }

private:
  // Each step is one circular spectral product on a work grid of
  // work_n >= grid.n samples; see the step planner in the implementation.
  struct Step {
    std::size_t work_n = 0;
    std::vector<cplx> multiplier;
  };

  void run(const Step& step, const std::vector<cplx>& in, std::vector<cplx>& out);

  SampleGrid m_grid;
  std::vector<cplx> m_mask;
  Step m_step_d1, m_step_d2, m_step_d;
  std::vector<cplx> m_field, m_next, m_pad;
};

} // namespace gsim
