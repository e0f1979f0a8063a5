#include "dqc/config.hpp"
#include "dqc/experiment.hpp"
#include "dqc/io.hpp"

#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <filesystem>

using namespace dqc;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("dqc_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string sweep_config(const fs::path& out) {
  return R"({
    "schema_version": 1,
    "experiment": "le_sweep",
    "model": {"kind": "mbl", "sites": 4, "w_grid": [2.0]},
    "trajectory": {"dt": 0.01, "transient_time": 2.0},
    "lyapunov": {"tau": 1.0, "n_renorms": 5},
    "sampling": {"n_disorder": 1, "n_traj": 2, "master_seed": 77},
    "output": {"directory": ")" +
         out.string() + R"("}
  })";
}

}  // namespace

TEST_CASE("minimal sweep config picks up the documented defaults") {
  const ExperimentConfig cfg = parse_config(R"({
    "schema_version": 1,
    "experiment": "le_sweep",
    "model": {"kind": "mbl", "sites": 8, "w_grid": [1.0, 20.0]}
  })");
  CHECK(cfg.model.j == 1.0);
  CHECK(cfg.model.u == 1.0);
  CHECK(cfg.model.gamma == 0.1);
  CHECK(cfg.lyapunov.core.delta0 == 1e-6);
  CHECK(cfg.lyapunov.core.tau == 10.0);
  CHECK(cfg.lyapunov.core.renorm_direction == RenormDirection::difference);
  CHECK(cfg.sampling.master_seed == 1);
}

TEST_CASE("integrable defaults differ") {
  const ExperimentConfig cfg = parse_config(R"({
    "schema_version": 1,
    "experiment": "le_distribution",
    "model": {"kind": "integrable", "sites": 5},
    "lyapunov": {"tau": 5.0, "observable": "goe_random"}
  })");
  CHECK(cfg.model.gamma == 1.0);
  CHECK(cfg.model.eta == 1);
  CHECK(cfg.model.kappa == -1);
  CHECK(cfg.lyapunov.core.tau == 5.0);
}

TEST_CASE("unknown keys are rejected by name") {
  try {
    (void)parse_config(R"({
      "schema_version": 1,
      "experiment": "le_sweep",
      "model": {"kind": "mbl", "sites": 4, "w_grid": [1.0], "typo_key": 3}
    })");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("typo_key") != std::string::npos);
  }
}

TEST_CASE("validation aggregates every issue") {
  try {
    (void)parse_config(R"({
      "schema_version": 1,
      "experiment": "le_sweep",
      "model": {"kind": "mbl", "sites": 5, "w_grid": [-1.0]},
      "trajectory": {"dt": -0.5}
    })");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.issues().size() >= 3);
    const std::string msg = e.what();
    CHECK(msg.find("model.sites") != std::string::npos);
    CHECK(msg.find("trajectory.dt") != std::string::npos);
  }
}

TEST_CASE("syntax errors carry position information") {
  CHECK_THROWS_AS((void)parse_config("{ not json"), ConfigError);
}

TEST_CASE("kind and model compatibility is enforced") {
  CHECK_THROWS_AS((void)parse_config(R"({
    "schema_version": 1,
    "experiment": "le_distribution",
    "model": {"kind": "mbl", "sites": 4, "w_grid": [1.0]}
  })"),
                  ConfigError);
  CHECK_THROWS_AS((void)parse_config(R"({
    "schema_version": 1,
    "experiment": "csr_experiment",
    "model": {"kind": "integrable", "sites": 4}
  })"),
                  ConfigError);
}

TEST_CASE("spectrum CSV round trip") {
  const fs::path dir = fresh_dir("spectrum_io");
  Spectrum spec;
  spec.eigenvalues = {Complex(-0.5, 0.25), Complex(0.0, 0.0),
                      Complex(-1.0 / 3.0, -0.125)};
  const fs::path path = dir / "spec.csv";
  io::write_spectrum_csv(path, spec);
  const Spectrum back = io::read_spectrum_csv(path);
  REQUIRE(back.eigenvalues.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(back.eigenvalues[k] == spec.eigenvalues[k]);
  }
  io::write_text_file(dir / "bad.csv", "re,im\n1.0\n");
  CHECK_THROWS_AS((void)io::read_spectrum_csv(dir / "bad.csv"), Error);
  fs::remove_all(dir);
}

TEST_CASE("unraveling check experiment writes its oracle comparison") {
  const fs::path dir = fresh_dir("unravel_exp");
  const std::string text = R"({
    "schema_version": 1,
    "experiment": "unraveling_check",
    "model": {"kind": "mbl", "sites": 4, "w": 2.0},
    "trajectory": {"dt": 0.01, "transient_time": 0.0, "run_time": 2.0},
    "sampling": {"ensemble_sizes": [100, 400], "master_seed": 5},
    "output": {"directory": ")" + dir.string() + R"("}
  })";
  const ExperimentConfig cfg = parse_config(text);
  const RunSummary summary = run_experiment(cfg, 2);
  CHECK(summary.n_cells_failed == 0);

  const auto result = io::read_json_file(dir / "unraveling.json");
  REQUIRE(result.at("entries").size() == 2);
  const double d100 = result.at("entries")[0].at("trace_distance").get<double>();
  const double d400 = result.at("entries")[1].at("trace_distance").get<double>();
  CHECK(d100 > 0.0);
  CHECK(d400 < d100);

  const auto manifest = io::read_json_file(dir / "manifest.json");
  CHECK(manifest.at("status") == "complete");
  CHECK(manifest.at("code_version") == kCodeVersion);
  fs::remove_all(dir);
}

TEST_CASE("sweep experiment resumes from stored cells") {
  const fs::path dir = fresh_dir("sweep_resume");
  const ExperimentConfig cfg = parse_config(sweep_config(dir));

  const RunSummary first = run_experiment(cfg, 2);
  CHECK(first.n_cells_failed == 0);
  CHECK(first.n_cells_reused == 0);
  const std::string sweep_before = io::read_text_file(dir / "sweep.csv");

  fs::remove(dir / "sweep.csv");
  const RunSummary second = run_experiment(cfg, 2);
  CHECK(second.n_cells_reused == second.n_cells_total);
  CHECK(io::read_text_file(dir / "sweep.csv") == sweep_before);
  fs::remove_all(dir);
}

TEST_CASE("plot bundles carry descriptors and data") {
  const fs::path dir = fresh_dir("bundle");
  const ExperimentConfig cfg = parse_config(sweep_config(dir));
  const RunSummary summary = run_experiment(cfg, 2);

  const fs::path bundle = dir / "bundle";
  const auto files = emit_plot_data(summary.manifest_path, bundle);
  CHECK(files.size() >= 3);
  CHECK(fs::exists(bundle / "descriptor.json"));
  CHECK(fs::exists(bundle / "sweep.csv"));
  CHECK(fs::exists(bundle / "cells.csv"));

  const auto descriptor = io::read_json_file(bundle / "descriptor.json");
  CHECK(descriptor.at("experiment") == "le_sweep");
  fs::remove_all(dir);
}

TEST_CASE("csr statistics from a spectrum file") {
  const fs::path dir = fresh_dir("csr_file");
  const Spectrum spec = sample_ginue(400, 3);
  const fs::path csv = dir / "ginue.csv";
  io::write_spectrum_csv(csv, spec);

  CsrBlock block;
  const auto files = csr_from_file(csv, block, dir / "stats");
  CHECK(files.size() == 5);
  const auto summary = io::read_json_file(dir / "stats" / "csr_summary.json");
  CHECK(summary.at("n_samples").get<int>() == 400);

  // Distances computed straight from the sampler must agree.
  const SummaryStats direct = summary_stats(csr_values(spec));
  CHECK(summary.at("mean_r").get<double>() == doctest::Approx(direct.mean_r));
  fs::remove_all(dir);
}

TEST_CASE("spectra export writes sidecars") {
  const fs::path dir = fresh_dir("spectra");
  const std::string text = R"({
    "schema_version": 1,
    "experiment": "csr_experiment",
    "model": {"kind": "mbl", "sites": 4, "w": 1.0},
    "sampling": {"n_disorder": 2, "master_seed": 3},
    "output": {"directory": ")" + dir.string() + R"("}
  })";
  const ExperimentConfig cfg = parse_config(text);
  const auto files = export_spectra(cfg, 2);
  CHECK(files.size() == 2);
  for (const auto& file : files) {
    CHECK(fs::exists(file));
    const fs::path sidecar = fs::path(file).replace_extension(".json");
    const auto meta = io::read_json_file(sidecar);
    CHECK(meta.at("sites") == 4);
    CHECK(meta.at("gamma") == 0.1);
    const Spectrum spec = io::read_spectrum_csv(file);
    CHECK(spec.eigenvalues.size() == 36);
  }
  fs::remove_all(dir);
}
