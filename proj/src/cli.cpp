#include "gsim/cli.hpp"

#include "gsim/errors.hpp"
#include "gsim/metrics.hpp"
#include "gsim/oracle.hpp"
#include "gsim/runner.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace gsim {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* kind_name(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::phase_grating: return "phase_grating";
    case ObjectKind::double_slit: return "double_slit";
    case ObjectKind::open_aperture: return "open_aperture";
    case ObjectKind::opaque_edge: return "opaque_edge";
    case ObjectKind::piecewise: return "piecewise";
  }
  return "?";
}

RunMode parse_mode(const std::string& name) {
  if (name == "ghost") return RunMode::ghost;
  if (name == "hbt") return RunMode::hbt;
  if (name == "both") return RunMode::both;
  if (name == "full_matrix") return RunMode::full_matrix;
  throw ValidationError("mode must be one of ghost, hbt, both, full_matrix");
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish_out(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void write_profile_csv(const std::filesystem::path& path, const CorrelationProfile& profile,
                       const std::vector<double>& se, const ExperimentConfig& cfg,
                       const char* label) {
  std::ofstream out = open_out(path);
  out << "# " << label << " correlation profile: bins pair the detector sample at x with the\n"
      << "# sample at -x; delta_I = <I I'> - <I><I'>\n"
      << "# mode=" << to_string(cfg.mode) << " frames=" << profile.count << " seed=" << cfg.seed
      << " grid_n=" << cfg.grid.n << " grid_dx=" << fmt(cfg.grid.dx)
      << " block_length=" << effective_block_length(cfg) << "\n"
      << "x_meters,delta_I,g2_minus_1,std_error\n";
  for (std::size_t i = 0; i < profile.axis.size(); ++i) {
    out << fmt(profile.axis[i]) << ',' << fmt(profile.delta_i[i]) << ','
        << fmt(profile.g2_minus_1[i]) << ',' << fmt(se.empty() ? 0.0 : se[i]) << '\n';
  }
  finish_out(out, path);
}

void write_matrix_csv(const std::filesystem::path& path, const CorrelationMatrix& matrix,
                      const ExperimentConfig& cfg) {
  std::ofstream out = open_out(path);
  const std::size_t bins = matrix.axis.size();
  out << "# intensity covariance on a decimated detector-pair lattice\n"
      << "# mode=" << to_string(cfg.mode) << " frames=" << matrix.count << " seed=" << cfg.seed
      << " bins=" << bins << "\n"
      << "x1_meters,x2_meters,delta_I,g2_minus_1\n";
  for (std::size_t r = 0; r < bins; ++r) {
    for (std::size_t c = 0; c < bins; ++c) {
      const std::size_t k = r * bins + c;
      out << fmt(matrix.axis[r]) << ',' << fmt(matrix.axis[c]) << ',' << fmt(matrix.delta_i[k])
          << ',' << fmt(matrix.g2_minus_1[k]) << '\n';
    }
  }
  finish_out(out, path);
}

// Reference values aligned to a symmetric profile's bins: the analytic
// curve is evaluated on the full grid, whose sample 0 has no mirror
// partner and so no bin.
std::vector<double> aligned_reference(const AnalyticCurve& curve) {
  return {curve.values.begin() + 1, curve.values.end()};
}

nlohmann::json curve_report(const CorrelationProfile& profile, const std::vector<double>& se,
                            const std::vector<double>* reference) {
  nlohmann::json node;
  node["bins"] = profile.axis.size();
  const PeakEstimate peak =
      refine_peak(profile.axis, profile.delta_i, 0, profile.axis.size(), 3);
  node["peak_position_m"] = peak.position;
  node["peak_delta_I"] = peak.value;
  if (!se.empty()) {
    node["mean_std_error"] =
        std::accumulate(se.begin(), se.end(), 0.0) / static_cast<double>(se.size());
  }
  if (reference) {
    try {
      const double scale = fit_scale(*reference, profile.delta_i);
      std::vector<double> scaled(*reference);
      for (double& v : scaled) v *= scale;
      node["reference_scale"] = scale;
      // reference has unit peak, so scale is also the peak height in
      // measurement units
      node["reference_rmse_rel_peak"] = rmse(profile.delta_i, scaled) / scale;
    } catch (const ValidationError&) {
      // degenerate reference (e.g. fully opaque object); skip the comparison
    }
  }
  return node;
}

void write_outputs(const RunOutcome& outcome, bool compare_reference) {
  const ExperimentConfig& cfg = outcome.config;
  const std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec && !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  }

  nlohmann::json report;
  report["mode"] = to_string(cfg.mode);
  report["frames"] = outcome.frames;
  report["seed"] = cfg.seed;
  report["grid"] = {{"n", cfg.grid.n}, {"dx_meters", cfg.grid.dx}};
  report["workers"] = cfg.workers;
  report["block_length"] = effective_block_length(cfg);
  report["wall_seconds"] = outcome.wall_seconds;

  if (outcome.ghost) {
    write_profile_csv(dir / "ghost.csv", *outcome.ghost, outcome.ghost_error, cfg,
                      "two-detector");
    std::optional<std::vector<double>> ref;
    if (compare_reference) {
      ref = aligned_reference(
          analytic_ghost_profile(cfg.object, cfg.geom, make_grid(cfg.grid.n, cfg.grid.dx)));
    }
    report["ghost"] = curve_report(*outcome.ghost, outcome.ghost_error, ref ? &*ref : nullptr);
    report["ghost"]["csv"] = "ghost.csv";
    std::cout << "ghost profile -> " << (dir / "ghost.csv").string() << "\n";
  }
  if (outcome.hbt) {
    write_profile_csv(dir / "hbt.csv", *outcome.hbt, outcome.hbt_error, cfg, "single-detector");
    std::optional<std::vector<double>> ref;
    if (compare_reference) {
      ref = aligned_reference(
          analytic_hbt_profile(cfg.object, cfg.geom, make_grid(cfg.grid.n, cfg.grid.dx)));
    }
    report["hbt"] = curve_report(*outcome.hbt, outcome.hbt_error, ref ? &*ref : nullptr);
    report["hbt"]["csv"] = "hbt.csv";
    std::cout << "single-arm profile -> " << (dir / "hbt.csv").string() << "\n";
  }
  if (outcome.matrix) {
    write_matrix_csv(dir / "matrix.csv", *outcome.matrix, cfg);
    report["matrix"] = {{"csv", "matrix.csv"}, {"bins", outcome.matrix->axis.size()}};
    std::cout << "covariance matrix -> " << (dir / "matrix.csv").string() << "\n";
  }

  const std::filesystem::path report_path = dir / "report.json";
  std::ofstream out = open_out(report_path);
  out << report.dump(2) << '\n';
  finish_out(out, report_path);
  std::cout << "report -> " << report_path.string() << "\n";
}

void write_reference_csv(const std::filesystem::path& path, const AnalyticCurve& curve,
                         const std::vector<const AnalyticCurve*>& extra_columns,
                         const std::vector<std::string>& extra_names, const char* label) {
  std::ofstream out = open_out(path);
  out << "# " << label << "\n";
  out << "x_meters,value";
  for (const auto& name : extra_names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < curve.axis.size(); ++i) {
    out << fmt(curve.axis[i]) << ',' << fmt(curve.values[i]);
    for (const AnalyticCurve* c : extra_columns) out << ',' << fmt(c->values[i]);
    out << '\n';
  }
  finish_out(out, path);
}

struct RunOptions {
  std::string config_path;
  std::string out_dir;
  std::string mode;
  std::string record_path;
  std::string replay_path;
  std::optional<std::uint64_t> frames;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> block_length;
  std::optional<std::uint64_t> workers;
  std::optional<std::uint64_t> matrix_bins;
  std::optional<std::uint64_t> grid_n;
  std::optional<double> grid_dx;
};

ExperimentConfig build_config(const RunOptions& opt) {
  ExperimentConfig cfg =
      opt.config_path.empty() ? ExperimentConfig{} : load_config(opt.config_path);
  if (!opt.mode.empty()) cfg.mode = parse_mode(opt.mode);
  if (opt.frames) cfg.frames = *opt.frames;
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.workers) cfg.workers = static_cast<std::size_t>(*opt.workers);
  if (opt.block_length) cfg.block_length = *opt.block_length;
  if (opt.matrix_bins) cfg.matrix_bins = static_cast<std::size_t>(*opt.matrix_bins);
  if (opt.grid_n) cfg.grid.n = static_cast<std::size_t>(*opt.grid_n);
  if (opt.grid_dx) cfg.grid.dx = *opt.grid_dx;
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  if (!opt.record_path.empty() && !opt.replay_path.empty()) {
    throw ValidationError("--record and --replay are mutually exclusive");
  }
  if (!opt.record_path.empty()) {
    cfg.archive = ArchiveMode::write;
    cfg.archive_path = opt.record_path;
  }
  if (!opt.replay_path.empty()) {
    cfg.archive = ArchiveMode::read;
    cfg.archive_path = opt.replay_path;
  }
  validate_config(cfg);
  return cfg;
}

void add_run_options(CLI::App* cmd, RunOptions& opt) {
  cmd->add_option("--config", opt.config_path, "key = value configuration file");
  cmd->add_option("--mode", opt.mode, "ghost | hbt | both | full_matrix")
      ->check(CLI::IsMember({"ghost", "hbt", "both", "full_matrix"}));
  cmd->add_option("--frames", opt.frames, "ensemble size");
  cmd->add_option("--seed", opt.seed, "ensemble seed");
  cmd->add_option("--workers", opt.workers, "worker threads");
  cmd->add_option("--block-length", opt.block_length,
                  "frames per jackknife block (0 = frames/50)");
  cmd->add_option("--matrix-bins", opt.matrix_bins, "decimated bins per side (full_matrix)");
  cmd->add_option("--grid-n", opt.grid_n, "grid samples (power of two)");
  cmd->add_option("--grid-dx", opt.grid_dx, "grid pitch in meters");
  cmd->add_option("--out", opt.out_dir, "output directory");
}

} // namespace

int run_cli(std::vector<std::string> args) {
  CLI::App app{
      "Monte-Carlo two-arm speckle correlator: pseudothermal ghost diffraction of "
      "phase objects, with single-arm intensity interferometry for contrast"};
  app.require_subcommand(1);

  // ---- run ----------------------------------------------------------
  RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "generate an ensemble and correlate it");
  add_run_options(run, run_opt);
  run->add_option("--record", run_opt.record_path, "record every frame to this archive");
  run->add_option("--replay", run_opt.replay_path,
                  "read frames from this archive instead of generating");
  run->callback([&] {
    const ExperimentConfig cfg = build_config(run_opt);
    std::cout << "run: mode=" << to_string(cfg.mode) << " frames=" << cfg.frames
              << " grid=" << cfg.grid.n << "x" << fmt(cfg.grid.dx) << "m workers=" << cfg.workers
              << std::endl;
    const RunOutcome outcome = run_ensemble(cfg);
    write_outputs(outcome, /*compare_reference=*/cfg.archive != ArchiveMode::read);
    std::cout << "done in " << outcome.wall_seconds << " s\n";
  });

  // ---- replay -------------------------------------------------------
  std::string replay_path, replay_mode = "ghost", replay_out = "out";
  std::uint64_t replay_block = 0;
  std::uint64_t replay_workers = 1, replay_bins = 128;
  CLI::App* replay =
      app.add_subcommand("replay", "re-correlate a recorded ensemble under another pairing");
  replay->add_option("archive", replay_path, "frame archive")->required();
  replay->add_option("--mode", replay_mode, "ghost | hbt | both | full_matrix")
      ->check(CLI::IsMember({"ghost", "hbt", "both", "full_matrix"}));
  replay->add_option("--workers", replay_workers, "worker threads");
  replay->add_option("--block-length", replay_block, "frames per jackknife block (0 = auto)");
  replay->add_option("--matrix-bins", replay_bins, "decimated bins per side (full_matrix)");
  replay->add_option("--out", replay_out, "output directory");
  replay->callback([&] {
    RunOutcome outcome =
        replay_archive_run(replay_path, parse_mode(replay_mode),
                           static_cast<std::size_t>(replay_workers), replay_block,
                           static_cast<std::size_t>(replay_bins));
    outcome.config.out_dir = replay_out;
    write_outputs(outcome, /*compare_reference=*/false);
    std::cout << "replayed " << outcome.frames << " frames in " << outcome.wall_seconds << " s\n";
  });

  // ---- oracle -------------------------------------------------------
  std::string oracle_config, oracle_out = "out";
  bool closed_form_variants = false;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "write the analytic reference curves for a configuration's detector axis");
  oracle->add_option("--config", oracle_config, "key = value configuration file");
  oracle->add_option("--out", oracle_out, "output directory");
  oracle->add_flag("--closed-form-variants", closed_form_variants,
                   "for gratings, also write the closed-form curve with second-harmonic "
                   "coefficients 2 and 4");
  oracle->callback([&] {
    const ExperimentConfig cfg =
        oracle_config.empty() ? ExperimentConfig{} : load_config(oracle_config);
    const SampleGrid grid = make_grid(cfg.grid.n, cfg.grid.dx);
    const std::filesystem::path dir(oracle_out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);

    const AnalyticCurve ghost = analytic_ghost_profile(cfg.object, cfg.geom, grid);
    std::vector<const AnalyticCurve*> extra;
    std::vector<std::string> names;
    AnalyticCurve c2, c4;
    if (closed_form_variants) {
      if (cfg.object.kind != ObjectKind::phase_grating) {
        throw ValidationError("--closed-form-variants needs a phase_grating object");
      }
      c2 = closed_form_grating_profile(cfg.object, cfg.geom, grid, 2.0);
      c4 = closed_form_grating_profile(cfg.object, cfg.geom, grid, 4.0);
      extra = {&c2, &c4};
      names = {"closed_form_c2", "closed_form_c4"};
    }
    write_reference_csv(dir / "ghost_reference.csv", ghost, extra, names,
                        "two-detector fringe reference: |FT t|^2 at nu = 2x/(lambda d2)");
    write_reference_csv(dir / "hbt_reference.csv",
                        analytic_hbt_profile(cfg.object, cfg.geom, grid), {}, {},
                        "single-detector reference: |FT |t|^2|^2 at nu = 2x/(lambda d2)");
    std::cout << "reference curves -> " << dir.string() << "\n";
  });

  // ---- validate -----------------------------------------------------
  std::string validate_config_path;
  CLI::App* validate = app.add_subcommand(
      "validate", "check a configuration and its sampling guards without running");
  validate->add_option("--config", validate_config_path, "key = value configuration file");
  validate->callback([&] {
    const ExperimentConfig cfg =
        validate_config_path.empty() ? ExperimentConfig{} : load_config(validate_config_path);
    validate_config(cfg);
    check_numerical_guards(cfg);
    const SampleGrid grid = make_grid(cfg.grid.n, cfg.grid.dx);
    std::cout << "configuration ok\n"
              << "mode=" << to_string(cfg.mode) << " frames=" << cfg.frames
              << " seed=" << cfg.seed << " workers=" << cfg.workers << "\n"
              << "grid: n=" << grid.n << " dx=" << fmt(grid.dx) << " m, extent "
              << fmt(grid.extent()) << " m\n"
              << "geometry: lambda=" << fmt(cfg.geom.lambda) << " d1=" << fmt(cfg.geom.d1)
              << " d2=" << fmt(cfg.geom.d2) << " d=" << fmt(cfg.geom.d) << "\n"
              << "object: " << kind_name(cfg.object.kind)
              << " aperture=" << fmt(object_aperture(cfg.object))
              << " min_feature=" << fmt(object_min_feature(cfg.object));
    if (cfg.object.kind == ObjectKind::phase_grating) {
      std::cout << " phase_step="
                << fmt(grating_phase(cfg.geom.lambda, cfg.object.groove_depth,
                                     cfg.object.refractive_index))
                << " rad";
    }
    std::cout << "\nsource: sigma=" << fmt(cfg.source.sigma) << " m "
              << (cfg.source.envelope == SpotEnvelope::hard ? "hard" : "gaussian")
              << " spot, mean intensity " << fmt(cfg.source.mean_intensity) << "\n"
              << "sampling guards: ok\n";
  });

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalGuardError& e) {
    std::cerr << "numerical guard: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

} // namespace gsim
