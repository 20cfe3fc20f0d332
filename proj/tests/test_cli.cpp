#include "doctest.h"

#include "gsim/cli.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using gsim::run_cli;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "gsim_cli_tests";
  fs::create_directories(dir);
  return dir;
}

/// Desk-scale configuration file: the default experiment divided by ten,
/// cheap enough for an in-process smoke test.
fs::path write_mini_config(const std::string& name, const std::string& extra = "") {
  const fs::path path = temp_dir() / name;
  std::ofstream out(path);
  out << "lambda = 0.532e-7\n"
         "d1 = 6e-3\n"
         "d2 = 7.5e-3\n"
         "d = 13.5e-3\n"
         "sigma = 0.3e-3\n"
         "zone_width = 15e-6\n"
         "groove_depth = 0.047e-6\n"
         "grid_n = 512\n"
         "grid_dx = 0.75e-6\n"
         "frames = 150\n"
      << extra;
  return path;
}

} // namespace

TEST_CASE("help and validation succeed without touching the filesystem") {
  CHECK(run_cli({"--help"}) == 0);
  CHECK(run_cli({"run", "--help"}) == 0);
  CHECK(run_cli({"validate"}) == 0);
}

TEST_CASE("a desk-scale run writes its outputs") {
  const fs::path cfg = write_mini_config("smoke.cfg");
  const fs::path out = temp_dir() / "smoke_out";
  fs::remove_all(out);
  const int rc = run_cli({"run", "--config", cfg.string(), "--mode", "both", "--out",
                          out.string()});
  CHECK(rc == 0);
  CHECK(fs::exists(out / "ghost.csv"));
  CHECK(fs::exists(out / "hbt.csv"));
  CHECK(fs::exists(out / "report.json"));
  fs::remove_all(out);
  fs::remove(cfg);
}

TEST_CASE("record and replay through the command line") {
  const fs::path cfg = write_mini_config("record.cfg");
  const fs::path archive = temp_dir() / "cli.gsim";
  const fs::path out1 = temp_dir() / "rec_out";
  const fs::path out2 = temp_dir() / "rep_out";
  fs::remove_all(out1);
  fs::remove_all(out2);
  CHECK(run_cli({"run", "--config", cfg.string(), "--mode", "both", "--record", archive.string(),
                 "--out", out1.string()}) == 0);
  CHECK(fs::exists(archive));
  CHECK(run_cli({"replay", archive.string(), "--mode", "hbt", "--out", out2.string()}) == 0);
  CHECK(fs::exists(out2 / "hbt.csv"));
  // --record and --replay on the same run contradict each other
  CHECK(run_cli({"run", "--config", cfg.string(), "--record", archive.string(), "--replay",
                 archive.string()}) == 1);
  fs::remove_all(out1);
  fs::remove_all(out2);
  fs::remove(archive);
  fs::remove(cfg);
}

TEST_CASE("input mistakes exit with 1") {
  CHECK(run_cli({"run", "--no-such-flag"}) == 1);
  CHECK(run_cli({"frobnicate"}) == 1);
  const fs::path bad = temp_dir() / "bad.cfg";
  {
    std::ofstream out(bad);
    out << "frames = 50\n";
  }
  CHECK(run_cli({"run", "--config", bad.string()}) == 1);
  CHECK(run_cli({"validate", "--config", bad.string()}) == 1);
  fs::remove(bad);
}

TEST_CASE("resolution problems exit with 2") {
  // default grid cannot resolve 40 um zones through a 3 mm spot
  const fs::path cfg = temp_dir() / "guard.cfg";
  {
    std::ofstream out(cfg);
    out << "zone_width = 40e-6\nframes = 150\n";
  }
  CHECK(run_cli({"validate", "--config", cfg.string()}) == 2);
  CHECK(run_cli({"run", "--config", cfg.string()}) == 2);
  fs::remove(cfg);
}

TEST_CASE("filesystem problems exit with 3") {
  CHECK(run_cli({"replay", (temp_dir() / "missing.gsim").string()}) == 3);
  CHECK(run_cli({"run", "--config", (temp_dir() / "missing.cfg").string()}) == 3);
}

TEST_CASE("reference curves are written for the configured object") {
  const fs::path cfg = write_mini_config("oracle.cfg");
  const fs::path out = temp_dir() / "oracle_out";
  fs::remove_all(out);
  CHECK(run_cli({"oracle", "--config", cfg.string(), "--out", out.string(),
                 "--closed-form-variants"}) == 0);
  CHECK(fs::exists(out / "ghost_reference.csv"));
  CHECK(fs::exists(out / "hbt_reference.csv"));
  fs::remove_all(out);
  fs::remove(cfg);

  // the closed form is grating-specific: asking for it elsewhere is an error
  const fs::path slits = write_mini_config(
      "slits.cfg", "object = double_slit\nslit_width = 8e-6\nslit_separation = 40e-6\n");
  CHECK(run_cli({"oracle", "--config", slits.string(), "--closed-form-variants"}) == 1);
  fs::remove(slits);
}
