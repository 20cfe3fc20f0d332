#include "gsim/oracle.hpp"

#include "gsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

namespace gsim {

namespace {

constexpr double pi = std::numbers::pi;

double sinc(double u) noexcept {
  if (u == 0.0) return 1.0;
  const double p = pi * u;
  return std::sin(p) / p;
}

AnalyticCurve normalized_curve(std::vector<double> axis, std::vector<double> values,
                               AnalyticFormula formula) {
  const double peak = *std::max_element(values.begin(), values.end());
  if (!(peak > 0.0)) {
    throw ValidationError("reference curve vanishes on the whole axis; nothing to normalize");
  }
  for (auto& v : values) v /= peak;
  AnalyticCurve curve;
  curve.axis = std::move(axis);
  curve.values = std::move(values);
  curve.formula = formula;
  return curve;
}

/// nu = 2 x / (lambda d2): back-to-back detector pairs sweep the object's
/// Fourier plane at twice the rate of a coherent system.
double slice_frequency(double x, const ArmGeometry& geom) {
  return 2.0 * x / (geom.lambda * geom.d2);
}

std::vector<Segment> intensity_segments(const std::vector<Segment>& segments) {
  std::vector<Segment> out;
  out.reserve(segments.size());
  for (const auto& s : segments) out.push_back({s.lo, s.hi, cplx(std::norm(s.t), 0.0)});
  return out;
}

void check_geometry(const ArmGeometry& geom) {
  if (!(geom.lambda > 0.0 && geom.d1 > 0.0 && geom.d2 > 0.0 && geom.d > 0.0)) {
    throw ValidationError("arm geometry lengths must all be positive");
  }
}

// ---- direct quadrature ----------------------------------------------------

/// Composite-Simpson lattice: nodes and weights whose dot product with
/// sampled integrand values approximates the integral.
struct Lattice {
  std::vector<double> x;
  std::vector<double> w;
};

void append_simpson(Lattice& lat, double lo, double hi, std::size_t subintervals) {
  const double h = (hi - lo) / static_cast<double>(subintervals);
  for (std::size_t j = 0; j <= subintervals; ++j) {
    const double weight = (j == 0 || j == subintervals) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    lat.x.push_back(lo + static_cast<double>(j) * h);
    lat.w.push_back(weight * h / 3.0);
  }
}

/// Even subinterval count sampling the fastest phase (bandwidth in
/// cycles per meter) twelve steps per period.
std::size_t chirp_subintervals(double bandwidth, double length, std::size_t minimum,
                               std::size_t cap, const char* what) {
  const double needed = 12.0 * bandwidth * length;
  auto r = static_cast<std::size_t>(std::ceil(needed));
  r += r % 2;
  r = std::max(r, minimum);
  if (r > cap) {
    throw NumericalGuardError(std::string(what) +
                              " quadrature needs more nodes than the refinement cap allows");
  }
  return r;
}

struct QuadratureContext {
  ArmGeometry geom;
  double mean_intensity = 0.0;
  Lattice source;               // nodes across the spot, amplitude folded into weights
  Lattice object;               // nodes across the transmitting segments
  std::vector<cplx> conj_t;     // conj(t) at each object node
  std::vector<cplx> d1_chirp;   // e^{+i pi (xs - xo)^2 / (lambda d1)}, source-major, or empty
};

QuadratureContext make_context(const ObjectSpec& object, const ArmGeometry& geom,
                               const SourceSpec& source, const SampleGrid& small_grid,
                               double max_abs_x1, double max_abs_x2, bool tabulate) {
  check_geometry(geom);
  if (small_grid.n > 256) {
    throw ValidationError("quadrature grid larger than 256 cells; this path is O(n^2)");
  }
  if (!(small_grid.n >= 8 && small_grid.dx > 0.0)) {
    throw ValidationError("quadrature grid needs n >= 8 and positive spacing");
  }
  const auto segments = object_segments(object, geom.lambda);
  const double half_aperture = object_aperture(object) / 2.0;

  // Integration half-span of the source: the hard spot ends at sigma/2;
  // the gaussian envelope's intensity is below 4e-4 beyond |x| = sigma.
  const double half = (source.envelope == SpotEnvelope::hard) ? source.sigma / 2.0 : source.sigma;
  if (2.0 * half > small_grid.extent() - 2.0 * small_grid.dx) {
    throw NumericalGuardError("source spot does not fit inside the quadrature grid extent");
  }

  QuadratureContext ctx;
  ctx.geom = geom;
  ctx.mean_intensity = source.mean_intensity;

  // Fastest local phase rates (cycles per meter) over the integration
  // domains, from the quadratic kernel arguments.
  const double source_band = (max_abs_x2 + half) / (geom.lambda * geom.d) +
                             (half_aperture + half) / (geom.lambda * geom.d1);
  const double object_band = (half + half_aperture) / (geom.lambda * geom.d1) +
                             (max_abs_x1 + half_aperture) / (geom.lambda * geom.d2);

  const auto cells = static_cast<std::size_t>(std::ceil(2.0 * half / small_grid.dx));
  const double cell_width = 2.0 * half / static_cast<double>(cells);
  const std::size_t per_cell = chirp_subintervals(source_band, cell_width, 2, 64, "source");
  for (std::size_t c = 0; c < cells; ++c) {
    const double lo = -half + static_cast<double>(c) * cell_width;
    append_simpson(ctx.source, lo, lo + cell_width, per_cell);
  }
  // Fold the source profile into the weights; drop dark nodes.
  {
    Lattice lit;
    for (std::size_t s = 0; s < ctx.source.x.size(); ++s) {
      const double amp = spot_amplitude(source, ctx.source.x[s]);
      if (amp == 0.0) continue;
      lit.x.push_back(ctx.source.x[s]);
      lit.w.push_back(ctx.source.w[s] * ctx.mean_intensity * amp * amp);
    }
    ctx.source = std::move(lit);
  }

  for (const auto& seg : segments) {
    const std::size_t subs =
        chirp_subintervals(object_band, seg.hi - seg.lo, 4, 4096, "object");
    const std::size_t before = ctx.object.x.size();
    append_simpson(ctx.object, seg.lo, seg.hi, subs);
    ctx.conj_t.resize(ctx.object.x.size());
    for (std::size_t j = before; j < ctx.object.x.size(); ++j) ctx.conj_t[j] = std::conj(seg.t);
  }

  if (tabulate && ctx.source.x.size() * ctx.object.x.size() <= 4'000'000) {
    ctx.d1_chirp.reserve(ctx.source.x.size() * ctx.object.x.size());
    const double inv = pi / (geom.lambda * geom.d1);
    for (double xs : ctx.source.x) {
      for (double xo : ctx.object.x) {
        const double u = xs - xo;
        ctx.d1_chirp.push_back(std::polar(1.0, inv * u * u));
      }
    }
  }
  return ctx;
}

double evaluate_point(const QuadratureContext& ctx, double x1, double x2) {
  const ArmGeometry& g = ctx.geom;
  const std::size_t n_obj = ctx.object.x.size();
  const std::size_t n_src = ctx.source.x.size();

  // Per-object-node factor for this detector position: conj(t) w times
  // the conjugated d2 kernel chirp.
  std::vector<cplx> a(n_obj);
  const double inv_d2 = pi / (g.lambda * g.d2);
  for (std::size_t j = 0; j < n_obj; ++j) {
    const double u = x1 - ctx.object.x[j];
    a[j] = ctx.conj_t[j] * ctx.object.w[j] * std::polar(1.0, inv_d2 * u * u);
  }

  const double inv_d1 = pi / (g.lambda * g.d1);
  const double inv_d = pi / (g.lambda * g.d);
  cplx total(0.0, 0.0);
  for (std::size_t s = 0; s < n_src; ++s) {
    const double xs = ctx.source.x[s];
    cplx inner(0.0, 0.0);
    if (!ctx.d1_chirp.empty()) {
      const cplx* row = ctx.d1_chirp.data() + s * n_obj;
      for (std::size_t j = 0; j < n_obj; ++j) inner += a[j] * row[j];
    } else {
      for (std::size_t j = 0; j < n_obj; ++j) {
        const double u = xs - ctx.object.x[j];
        inner += a[j] * std::polar(1.0, inv_d1 * u * u);
      }
    }
    const double v = x2 - xs;
    total += ctx.source.w[s] * inner * std::polar(1.0, -inv_d * v * v);
  }
  // Constant kernel amplitudes 1/(lambda d1), 1/(lambda d2), 1/(lambda d);
  // the e^{-ikd} factors of the two arms cancel inside |h1* h2|.
  const double amp = 1.0 / (g.lambda * g.d1 * g.lambda * g.d2 * g.lambda * g.d);
  return std::norm(total) * amp * amp;
}

} // namespace

cplx transform_value(const std::vector<Segment>& segments, double nu) {
  cplx sum(0.0, 0.0);
  for (const auto& s : segments) {
    const double len = s.hi - s.lo;
    const double mid = 0.5 * (s.lo + s.hi);
    sum += s.t * len * sinc(nu * len) * std::polar(1.0, -2.0 * pi * nu * mid);
  }
  return sum;
}

double transform_power(const std::vector<Segment>& segments, double nu) {
  return std::norm(transform_value(segments, nu));
}

AnalyticCurve analytic_ghost_profile(const ObjectSpec& object, const ArmGeometry& geom,
                                     const SampleGrid& axis) {
  check_geometry(geom);
  const auto segments = object_segments(object, geom.lambda);
  auto coords = grid_coords(axis);
  std::vector<double> values(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    values[i] = transform_power(segments, slice_frequency(coords[i], geom));
  }
  const auto tag = (object.kind == ObjectKind::phase_grating) ? AnalyticFormula::ghost_phase_grating
                                                              : AnalyticFormula::fraunhofer_custom;
  return normalized_curve(std::move(coords), std::move(values), tag);
}

AnalyticCurve analytic_hbt_profile(const ObjectSpec& object, const ArmGeometry& geom,
                                   const SampleGrid& axis) {
  check_geometry(geom);
  const auto segments = intensity_segments(object_segments(object, geom.lambda));
  auto coords = grid_coords(axis);
  std::vector<double> values(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    values[i] = transform_power(segments, slice_frequency(coords[i], geom));
  }
  return normalized_curve(std::move(coords), std::move(values), AnalyticFormula::hbt_aperture);
}

AnalyticCurve closed_form_grating_profile(const ObjectSpec& object, const ArmGeometry& geom,
                                          const SampleGrid& axis,
                                          double second_harmonic_coefficient) {
  check_geometry(geom);
  if (object.kind != ObjectKind::phase_grating) {
    throw ValidationError("closed-form profile is defined for the five-zone grating only");
  }
  const double a = object.zone_width;
  auto coords = grid_coords(axis);
  std::vector<double> values(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const double nu = slice_frequency(coords[i], geom);
    const double u = 2.0 * pi * a * nu;
    const double bracket =
        1.0 - 2.0 * std::cos(u) + second_harmonic_coefficient * std::cos(2.0 * u);
    const double envelope = sinc(a * nu);
    values[i] = envelope * envelope * bracket * bracket;
  }
  return normalized_curve(std::move(coords), std::move(values),
                          AnalyticFormula::ghost_phase_grating);
}

double quadrature_delta_i(const ObjectSpec& object, const ArmGeometry& geom,
                          const SourceSpec& source, const SampleGrid& small_grid, double x1,
                          double x2) {
  const auto ctx =
      make_context(object, geom, source, small_grid, std::abs(x1), std::abs(x2), false);
  return evaluate_point(ctx, x1, x2);
}

std::vector<double> quadrature_ghost_slice(const ObjectSpec& object, const ArmGeometry& geom,
                                           const SourceSpec& source,
                                           const SampleGrid& small_grid,
                                           const std::vector<double>& points) {
  double reach = 0.0;
  for (double x : points) reach = std::max(reach, std::abs(x));
  const auto ctx = make_context(object, geom, source, small_grid, reach, reach, true);
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out[i] = evaluate_point(ctx, points[i], -points[i]);
  }
  return out;
}

MiniaturePreset miniature_preset() {
  MiniaturePreset preset;
  preset.geom.lambda = 0.532e-7;
  preset.geom.d1 = 6.0e-3;
  preset.geom.d2 = 7.5e-3;
  preset.geom.d = 13.5e-3;
  preset.object.kind = ObjectKind::phase_grating;
  preset.object.zone_width = 15.0e-6;
  preset.object.groove_depth = 0.047e-6;
  preset.object.refractive_index = 1.57;
  preset.source.mean_intensity = 1.0;
  preset.source.sigma = 0.3e-3;
  preset.source.envelope = SpotEnvelope::hard;
  // Smallest power-of-two grid that both holds the scaled spot and
  // keeps the detector-plane correlation band clear of wrap-around.
  preset.mc_grid = make_grid(512, 0.75e-6);
  preset.quadrature_grid = make_grid(128, 2.5e-6);
  preset.frames = 100'000;
  return preset;
}

} // namespace gsim
