#include "gsim/optics.hpp"

#include "gsim/errors.hpp"
#include "gsim/fft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) {
    throw ValidationError(std::string(name) + " must be positive, got " + std::to_string(v));
  }
}

} // namespace

double grating_phase(double lambda, double groove_depth, double refractive_index) noexcept {
  return 2.0 * kPi * (refractive_index - 1.0) * groove_depth / lambda;
}

std::vector<Segment> object_segments(const ObjectSpec& object, double lambda) {
  require_positive(lambda, "lambda");
  std::vector<Segment> segs;
  switch (object.kind) {
    case ObjectKind::phase_grating: {
      require_positive(object.zone_width, "zone_width");
      if (object.groove_depth < 0.0) throw ValidationError("groove_depth must be non-negative");
      const double a = object.zone_width;
      if (object.total_aperture != 0.0 &&
          std::abs(object.total_aperture - 5.0 * a) > 1e-12) {
        throw ValidationError("phase grating aperture is fixed at five zones; leave "
                              "total_aperture unset or equal to 5*zone_width");
      }
      const double phi = grating_phase(lambda, object.groove_depth, object.refractive_index);
      const cplx etched = std::polar(1.0, phi);
      for (int z = 0; z < 5; ++z) {
        const double lo = (static_cast<double>(z) - 2.5) * a;
        segs.push_back(Segment{lo, lo + a, (z % 2 == 1) ? etched : cplx(1.0, 0.0)});
      }
      break;
    }
    case ObjectKind::double_slit: {
      require_positive(object.slit_width, "slit_width");
      require_positive(object.slit_separation, "slit_separation");
      if (object.slit_separation <= object.slit_width) {
        throw ValidationError("slit_separation (center to center) must exceed slit_width");
      }
      const double w = object.slit_width;
      const double s = object.slit_separation;
      segs.push_back(Segment{-0.5 * s - 0.5 * w, -0.5 * s + 0.5 * w, cplx(1.0, 0.0)});
      segs.push_back(Segment{0.5 * s - 0.5 * w, 0.5 * s + 0.5 * w, cplx(1.0, 0.0)});
      break;
    }
    case ObjectKind::open_aperture: {
      require_positive(object.total_aperture, "total_aperture");
      const double half = 0.5 * object.total_aperture;
      segs.push_back(Segment{-half, half, cplx(1.0, 0.0)});
      break;
    }
    case ObjectKind::opaque_edge: {
      require_positive(object.total_aperture, "total_aperture");
      const double half = 0.5 * object.total_aperture;
      if (!(object.edge_position > -half && object.edge_position < half)) {
        throw ValidationError("edge_position must lie strictly inside the aperture");
      }
      segs.push_back(Segment{object.edge_position, half, cplx(1.0, 0.0)});
      break;
    }
    case ObjectKind::piecewise: {
      if (object.segments.empty()) throw ValidationError("piecewise object has no segments");
      segs = object.segments;
      std::sort(segs.begin(), segs.end(),
                [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
      for (std::size_t i = 0; i < segs.size(); ++i) {
        if (!(segs[i].hi > segs[i].lo)) throw ValidationError("piecewise segment has no width");
        if (i > 0 && segs[i].lo < segs[i - 1].hi - 1e-15) {
          throw ValidationError("piecewise segments overlap");
        }
      }
      break;
    }
  }
  return segs;
}

double object_aperture(const ObjectSpec& object) {
  const auto segs = object_segments(object, 1.0e-6); // geometry only, any wavelength
  return segs.back().hi - segs.front().lo;
}

double object_min_feature(const ObjectSpec& object) {
  switch (object.kind) {
    case ObjectKind::phase_grating:
      return object.zone_width;
    case ObjectKind::double_slit:
      return std::min(object.slit_width, object.slit_separation - object.slit_width);
    case ObjectKind::open_aperture:
      return object.total_aperture;
    case ObjectKind::opaque_edge:
      return 0.25 * object.total_aperture;
    case ObjectKind::piecewise: {
      double feature = std::numeric_limits<double>::infinity();
      for (const auto& s : object.segments) feature = std::min(feature, s.hi - s.lo);
      return feature;
    }
  }
  return 0.0;
}

std::vector<cplx> transmittance(const ObjectSpec& object, const SampleGrid& grid, double lambda) {
  const auto segs = object_segments(object, lambda);
  const double feature = object_min_feature(object);
  if (feature < 8.0 * grid.dx) {
    throw NumericalGuardError("object feature of " + std::to_string(feature) +
                              " m is under-resolved; need at least 8 samples per feature "
                              "(dx = " + std::to_string(grid.dx) + " m)");
  }
  const double aperture = segs.back().hi - segs.front().lo;
  if (aperture > grid.extent()) {
    throw NumericalGuardError("object aperture exceeds the grid extent");
  }
  std::vector<cplx> t(grid.n, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.coord(i);
    for (const auto& s : segs) {
      if (x >= s.lo && x < s.hi) {
        t[i] = s.t;
        break;
      }
    }
  }
  return t;
}

std::vector<cplx> fresnel_symbol(const SampleGrid& grid, double distance, double lambda) {
  require_positive(distance, "propagation distance");
  require_positive(lambda, "lambda");
  const double k = 2.0 * kPi / lambda;
  std::vector<cplx> sym(grid.n);
  for (std::size_t m = 0; m < grid.n; ++m) {
    const double nu = fft::bin_frequency(m, grid.n, grid.dx);
    sym[m] = std::polar(1.0, -k * distance + kPi * lambda * distance * nu * nu);
  }
  return sym;
}

namespace {

// One free-space step reduced to a single circular spectral product on a
// work grid of work_n >= grid.n samples. Which multiplier is sound depends
// on where lambda*d sits against the grid area n*dx^2:
//
//   lambda*d <= n*dx^2    the symbol exp(i pi lambda d nu^2) stays below
//                         its Nyquist rate on the native grid;
//   <= 2n*dx^2            doubling the grid puts it back under Nyquist;
//   otherwise             the sampled spatial chirp exp(-i pi u^2/(lambda d))
//                         is clean over every tap |u| <= (n-1) dx, and the
//                         step becomes an exact linear convolution: 2n-1
//                         taps on a 2n transform, so the circular wrap
//                         never reaches the cropped window.
//
// Each branch is used only where it is exact, so there is no sampling
// regime left to guard against: aliasing is avoided by construction
// rather than rejected at run time.
struct StepPlan {
  std::size_t work_n = 0;
  std::vector<cplx> multiplier;
};

StepPlan plan_step(const SampleGrid& grid, double distance, double lambda) {
  require_positive(distance, "propagation distance");
  require_positive(lambda, "lambda");
  const double reach = lambda * distance;
  const double area = static_cast<double>(grid.n) * grid.dx * grid.dx;
  StepPlan plan;
  if (reach <= area) {
    plan.work_n = grid.n;
    plan.multiplier = fresnel_symbol(grid, distance, lambda);
    return plan;
  }
  plan.work_n = 2 * grid.n;
  if (reach <= 2.0 * area) {
    plan.multiplier = fresnel_symbol(SampleGrid{plan.work_n, grid.dx}, distance, lambda);
    return plan;
  }
  // Sampled kernel dx * exp(-i(kd + pi u^2/(lambda d))) / sqrt(-i lambda d),
  // the spatial pair of the symbol above (same amplitude convention: the
  // constant prefactor keeps the step norm-preserving in the continuum).
  const double k = 2.0 * kPi / lambda;
  const double amp = grid.dx / std::sqrt(reach);
  std::vector<cplx> taps(plan.work_n, cplx(0.0, 0.0));
  const auto n = static_cast<std::ptrdiff_t>(grid.n);
  for (std::ptrdiff_t j = -(n - 1); j <= n - 1; ++j) {
    const double u = static_cast<double>(j) * grid.dx;
    const double phase = kPi / 4.0 - k * distance - kPi * u * u / reach;
    taps[static_cast<std::size_t>((j + static_cast<std::ptrdiff_t>(plan.work_n)) %
                                  static_cast<std::ptrdiff_t>(plan.work_n))] =
        std::polar(amp, phase);
  }
  fft::forward(taps);
  plan.multiplier = std::move(taps);
  return plan;
}

// Pad into the work buffer (data centred so both wrap margins are equal),
// run the spectral product, crop back to the native window. Templated so
// the propagator's equivalent Step struct runs through the same mechanics.
template <class StepLike>
void run_step(const StepLike& plan, const std::vector<cplx>& in, std::vector<cplx>& out,
              std::vector<cplx>& work) {
  const std::size_t n = in.size();
  if (plan.work_n == n) {
    out = in;
    fft::forward(out);
    for (std::size_t m = 0; m < n; ++m) out[m] *= plan.multiplier[m];
    fft::inverse(out);
    return;
  }
  const std::size_t off = (plan.work_n - n) / 2;
  work.assign(plan.work_n, cplx(0.0, 0.0));
  std::copy(in.begin(), in.end(), work.begin() + static_cast<std::ptrdiff_t>(off));
  fft::forward(work);
  for (std::size_t m = 0; m < plan.work_n; ++m) work[m] *= plan.multiplier[m];
  fft::inverse(work);
  out.assign(work.begin() + static_cast<std::ptrdiff_t>(off),
             work.begin() + static_cast<std::ptrdiff_t>(off + n));
}

} // namespace

ComplexField fresnel_kernel_apply(const ComplexField& field, double distance, double lambda) {
  const StepPlan plan = plan_step(field.grid, distance, lambda);
  ComplexField out{field.grid, std::vector<cplx>(field.grid.n)};
  std::vector<cplx> work;
  run_step(plan, field.values, out.values, work);
  return out;
}

ComplexField propagate_arm1(const ComplexField& source_field, const std::vector<cplx>& mask,
                            const ArmGeometry& geom) {
  if (mask.size() != source_field.grid.n) {
    throw ValidationError("mask sample count does not match the field grid");
  }
  ComplexField at_object = fresnel_kernel_apply(source_field, geom.d1, geom.lambda);
  for (std::size_t i = 0; i < at_object.values.size(); ++i) at_object.values[i] *= mask[i];
  return fresnel_kernel_apply(at_object, geom.d2, geom.lambda);
}

ComplexField propagate_arm1(const ComplexField& source_field, const ObjectSpec& object,
                            const ArmGeometry& geom) {
  return propagate_arm1(source_field, transmittance(object, source_field.grid, geom.lambda),
                        geom);
}

ComplexField propagate_arm2(const ComplexField& source_field, const ArmGeometry& geom) {
  return fresnel_kernel_apply(source_field, geom.d, geom.lambda);
}

IntensityFrame fraunhofer_2f_reference(const ObjectSpec& object, double lambda,
                                       double focal_length, const SampleGrid& grid,
                                       std::size_t pad_factor) {
  require_positive(focal_length, "focal_length");
  if (pad_factor == 0 || (pad_factor & (pad_factor - 1)) != 0) {
    throw ValidationError("pad_factor must be a power of two");
  }
  const auto t = transmittance(object, grid, lambda);
  const std::size_t big_n = grid.n * pad_factor;

  // Assemble the padded mask with x = 0 at DFT index 0 so the plain FFT
  // evaluates sum t(x) exp(-2 pi i nu x).
  std::vector<cplx> padded(big_n, cplx(0.0, 0.0));
  const std::size_t half = grid.n / 2;
  for (std::size_t i = 0; i < grid.n; ++i) {
    const std::size_t shifted = (i + big_n - half) % big_n;
    padded[shifted] = t[i];
  }
  fft::forward(padded);

  // Focal-plane axis: x = lambda f nu, ascending after the fftshift.
  const double dxf = lambda * focal_length / (static_cast<double>(big_n) * grid.dx);
  IntensityFrame out{SampleGrid{big_n, dxf}, std::vector<double>(big_n)};
  for (std::size_t j = 0; j < big_n; ++j) {
    const std::size_t m = (j + big_n / 2) % big_n; // DFT bin for ascending frequency
    out.values[j] = std::norm(padded[m] * grid.dx);
  }
  return out;
}

TwoArmPropagator::TwoArmPropagator(const SampleGrid& grid, const ObjectSpec& object,
                                   const ArmGeometry& geom)
    : m_grid(grid), m_mask(transmittance(object, grid, geom.lambda)) {
  const auto adopt = [](StepPlan&& plan) {
    return Step{plan.work_n, std::move(plan.multiplier)};
  };
  m_step_d1 = adopt(plan_step(grid, geom.d1, geom.lambda));
  m_step_d2 = adopt(plan_step(grid, geom.d2, geom.lambda));
  m_step_d = adopt(plan_step(grid, geom.d, geom.lambda));
}

void TwoArmPropagator::run(const Step& step, const std::vector<cplx>& in,
                           std::vector<cplx>& out) {
  run_step(step, in, out, m_pad);
}

void TwoArmPropagator::frame(const ComplexField& source_field, std::vector<double>& intensity1,
                             std::vector<double>& intensity2) {
  if (source_field.grid != m_grid) throw ValidationError("propagator grid mismatch");
  const std::size_t n = m_grid.n;
  intensity1.resize(n);
  intensity2.resize(n);

  // Reference arm: one step over the whole distance.
  run(m_step_d, source_field.values, m_field);
  for (std::size_t i = 0; i < n; ++i) intensity2[i] = std::norm(m_field[i]);

  // Object arm: to the mask, through it, on to the detector.
  run(m_step_d1, source_field.values, m_field);
  for (std::size_t i = 0; i < n; ++i) m_field[i] *= m_mask[i];
  run(m_step_d2, m_field, m_next);
  for (std::size_t i = 0; i < n; ++i) intensity1[i] = std::norm(m_next[i]);
}

void TwoArmPropagator::frame_arm1(const ComplexField& source_field,
                                  std::vector<double>& intensity1) {
  if (source_field.grid != m_grid) throw ValidationError("propagator grid mismatch");
  const std::size_t n = m_grid.n;
  intensity1.resize(n);
  run(m_step_d1, source_field.values, m_field);
  for (std::size_t i = 0; i < n; ++i) m_field[i] *= m_mask[i];
  run(m_step_d2, m_field, m_next);
  for (std::size_t i = 0; i < n; ++i) intensity1[i] = std::norm(m_next[i]);
}

} // namespace gsim
