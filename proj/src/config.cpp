#include "gsim/config.hpp"

#include "gsim/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace gsim {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& what) {
  throw ValidationError(origin + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& origin, std::size_t line, const std::string& key,
                    const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    fail(origin, line, key + ": not a number: '" + value + "'");
  }
  if (used != value.size() || std::isnan(v)) {
    fail(origin, line, key + ": not a number: '" + value + "'");
  }
  return v;
}

std::uint64_t parse_count(const std::string& origin, std::size_t line, const std::string& key,
                          const std::string& value) {
  if (value.empty() || value[0] == '-' || value[0] == '+') {
    fail(origin, line, key + ": expected a nonnegative integer, got '" + value + "'");
  }
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    fail(origin, line, key + ": expected a nonnegative integer, got '" + value + "'");
  }
  if (used != value.size()) {
    fail(origin, line, key + ": expected a nonnegative integer, got '" + value + "'");
  }
  return v;
}

double parse_positive(const std::string& origin, std::size_t line, const std::string& key,
                      const std::string& value) {
  const double v = parse_double(origin, line, key, value);
  if (!(v > 0.0)) fail(origin, line, key + " must be positive (meters/SI units)");
  return v;
}

} // namespace

std::uint64_t effective_block_length(const ExperimentConfig& cfg) {
  if (cfg.block_length > 0) return cfg.block_length;
  return std::max<std::uint64_t>(1, cfg.frames / 50);
}

const char* to_string(RunMode mode) noexcept {
  switch (mode) {
    case RunMode::ghost: return "ghost";
    case RunMode::hbt: return "hbt";
    case RunMode::both: return "both";
    case RunMode::full_matrix: return "full_matrix";
  }
  return "?";
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string stripped = trim(raw);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) fail(origin, line, "expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) fail(origin, line, "expected 'key = value'");
    if (value.empty()) fail(origin, line, key + ": empty value");
    if (!seen.insert(key).second) fail(origin, line, "duplicate key '" + key + "'");

    if (key == "lambda") {
      cfg.geom.lambda = parse_positive(origin, line, key, value);
    } else if (key == "d1") {
      cfg.geom.d1 = parse_positive(origin, line, key, value);
    } else if (key == "d2") {
      cfg.geom.d2 = parse_positive(origin, line, key, value);
    } else if (key == "d") {
      cfg.geom.d = parse_positive(origin, line, key, value);
    } else if (key == "sigma") {
      cfg.source.sigma = parse_positive(origin, line, key, value);
    } else if (key == "mean_intensity") {
      cfg.source.mean_intensity = parse_positive(origin, line, key, value);
    } else if (key == "envelope") {
      if (value == "hard") {
        cfg.source.envelope = SpotEnvelope::hard;
      } else if (value == "gaussian") {
        cfg.source.envelope = SpotEnvelope::gaussian;
      } else {
        fail(origin, line, "envelope must be 'hard' or 'gaussian'");
      }
    } else if (key == "object") {
      if (value == "phase_grating") {
        cfg.object.kind = ObjectKind::phase_grating;
      } else if (value == "double_slit") {
        cfg.object.kind = ObjectKind::double_slit;
      } else if (value == "open_aperture") {
        cfg.object.kind = ObjectKind::open_aperture;
      } else if (value == "opaque_edge") {
        cfg.object.kind = ObjectKind::opaque_edge;
      } else {
        fail(origin, line,
             "object must be one of phase_grating, double_slit, open_aperture, opaque_edge");
      }
    } else if (key == "zone_width") {
      cfg.object.zone_width = parse_positive(origin, line, key, value);
    } else if (key == "groove_depth") {
      cfg.object.groove_depth = parse_double(origin, line, key, value);
      if (cfg.object.groove_depth < 0.0) fail(origin, line, "groove_depth must be >= 0");
    } else if (key == "refractive_index") {
      cfg.object.refractive_index = parse_positive(origin, line, key, value);
    } else if (key == "slit_width") {
      cfg.object.slit_width = parse_positive(origin, line, key, value);
    } else if (key == "slit_separation") {
      cfg.object.slit_separation = parse_positive(origin, line, key, value);
    } else if (key == "edge_position") {
      cfg.object.edge_position = parse_double(origin, line, key, value);
    } else if (key == "total_aperture") {
      cfg.object.total_aperture = parse_positive(origin, line, key, value);
    } else if (key == "grid_n") {
      cfg.grid.n = parse_count(origin, line, key, value);
    } else if (key == "grid_dx") {
      cfg.grid.dx = parse_positive(origin, line, key, value);
    } else if (key == "frames") {
      cfg.frames = parse_count(origin, line, key, value);
    } else if (key == "seed") {
      cfg.seed = parse_count(origin, line, key, value);
    } else if (key == "mode") {
      if (value == "ghost") {
        cfg.mode = RunMode::ghost;
      } else if (value == "hbt") {
        cfg.mode = RunMode::hbt;
      } else if (value == "both") {
        cfg.mode = RunMode::both;
      } else if (value == "full_matrix") {
        cfg.mode = RunMode::full_matrix;
      } else {
        fail(origin, line, "mode must be one of ghost, hbt, both, full_matrix");
      }
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "archive") {
      if (value == "none") {
        cfg.archive = ArchiveMode::none;
      } else if (value == "write") {
        cfg.archive = ArchiveMode::write;
      } else if (value.rfind("read:", 0) == 0) {
        cfg.archive = ArchiveMode::read;
        cfg.archive_path = trim(value.substr(5));
        if (cfg.archive_path.empty()) fail(origin, line, "archive read needs a path: 'read:PATH'");
      } else {
        fail(origin, line, "archive must be 'none', 'write', or 'read:PATH'");
      }
    } else if (key == "workers") {
      const std::uint64_t w = parse_count(origin, line, key, value);
      if (w < 1 || w > 256) fail(origin, line, "workers must be in [1, 256]");
      cfg.workers = static_cast<std::size_t>(w);
    } else if (key == "block_length") {
      cfg.block_length = parse_count(origin, line, key, value);
    } else if (key == "matrix_bins") {
      const std::uint64_t b = parse_count(origin, line, key, value);
      if (b < 1) fail(origin, line, "matrix_bins must be >= 1");
      cfg.matrix_bins = static_cast<std::size_t>(b);
    } else {
      fail(origin, line, "unknown key '" + key + "'");
    }
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading config file: " + path);
  return parse_config(buf.str(), path);
}

void validate_config(const ExperimentConfig& cfg) {
  if (!(cfg.geom.lambda > 0 && cfg.geom.d1 > 0 && cfg.geom.d2 > 0 && cfg.geom.d > 0)) {
    throw ValidationError("geometry lengths must all be positive");
  }
  if (!(cfg.source.sigma > 0 && cfg.source.mean_intensity > 0)) {
    throw ValidationError("source spot diameter and mean intensity must be positive");
  }
  make_grid(cfg.grid.n, cfg.grid.dx); // power-of-two and spacing checks
  if (cfg.frames < 100) {
    throw ValidationError("frames = " + std::to_string(cfg.frames) +
                          " is below the statistical minimum of 100");
  }
  if (cfg.workers < 1) throw ValidationError("workers must be >= 1");
  if (cfg.matrix_bins < 1 || cfg.matrix_bins > cfg.grid.n) {
    throw ValidationError("matrix_bins must lie in [1, grid_n]");
  }
  if (cfg.mode == RunMode::ghost || cfg.mode == RunMode::both) {
    const double sum = cfg.geom.d1 + cfg.geom.d2;
    if (std::abs(cfg.geom.d - sum) >= 1.0e-12) {
      std::ostringstream msg;
      msg << "ghost pairing requires the back-to-back condition d = d1 + d2 "
             "(the reference arm must match the object arm's total length); got d = "
          << cfg.geom.d << ", d1 + d2 = " << sum;
      throw ValidationError(msg.str());
    }
  }
  // Shape-level object validation (zone counts, slit overlap, apertures).
  object_segments(cfg.object, cfg.geom.lambda);
}

} // namespace gsim
