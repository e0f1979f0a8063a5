#include "dqc/config.hpp"
#include "dqc/experiment.hpp"
#include "dqc/io.hpp"
#include "dqc/parallel.hpp"
#include "dqc/selfcheck.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

dqc::ExperimentConfig load_config(const std::string& path,
                                  std::uint64_t seed_override, bool has_seed,
                                  const std::string& out_override) {
  dqc::ExperimentConfig cfg =
      dqc::parse_config(dqc::io::read_text_file(path));
  if (has_seed) cfg.sampling.master_seed = seed_override;
  if (!out_override.empty()) cfg.output.directory = out_override;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dissipative quantum chaos toolbox"};
  app.require_subcommand(1);

  int workers = 0;  // 0 = hardware concurrency
  app.add_option("--workers", workers, "worker thread count (0 = auto)")
      ->capture_default_str();

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool has_seed = false;

  auto* simulate = app.add_subcommand("simulate", "run an experiment config");
  simulate->add_option("--config", config_path, "config JSON path")->required();
  simulate->add_option("--seed", seed, "override sampling.master_seed")
      ->each([&](const std::string&) { has_seed = true; });
  simulate->add_option("--out", out_dir, "override output.directory");

  auto* spectrum_cmd =
      app.add_subcommand("spectrum", "write model eigenvalue CSVs");
  spectrum_cmd->add_option("--config", config_path, "config JSON path")
      ->required();
  spectrum_cmd->add_option("--seed", seed, "override sampling.master_seed")
      ->each([&](const std::string&) { has_seed = true; });
  spectrum_cmd->add_option("--out", out_dir, "override output.directory");

  std::string spectrum_file;
  dqc::CsrBlock csr_block;
  auto* csr_cmd =
      app.add_subcommand("csr", "spacing-ratio statistics of a spectrum CSV");
  csr_cmd->add_option("--spectrum", spectrum_file, "eigenvalue CSV (re,im)")
      ->required();
  csr_cmd->add_option("--bins", csr_block.bins, "2D histogram bins per axis")
      ->capture_default_str();
  csr_cmd
      ->add_option("--marginal-bins", csr_block.marginal_bins,
                   "bins for marginals and sections")
      ->capture_default_str();
  csr_cmd
      ->add_option("--stripe", csr_block.stripe_halfwidth,
                   "half-width of the real-axis stripe")
      ->capture_default_str();
  csr_cmd->add_flag("--drop-stationary", csr_block.drop_stationary,
                    "drop the eigenvalue nearest zero");
  csr_cmd->add_option("--out", out_dir, "output directory")->required();

  auto* check_cmd =
      app.add_subcommand("check", "run the invariant and oracle suite");
  (void)check_cmd;

  std::string manifest_path;
  std::string bundle_dir;
  auto* report_cmd =
      app.add_subcommand("report", "package plot bundles from a manifest");
  report_cmd->add_option("--manifest", manifest_path, "manifest.json path")
      ->required();
  report_cmd->add_option("--out", bundle_dir, "bundle directory")->required();

  CLI11_PARSE(app, argc, argv);
  if (workers <= 0) workers = dqc::default_workers();

  try {
    if (simulate->parsed()) {
      const dqc::ExperimentConfig cfg =
          load_config(config_path, seed, has_seed, out_dir);
      const dqc::RunSummary summary = dqc::run_experiment(cfg, workers);
      std::cout << "manifest: " << summary.manifest_path.string() << "\n"
                << "cells: " << summary.n_cells_total << " ("
                << summary.n_cells_reused << " reused, "
                << summary.n_cells_failed << " failed)\n"
                << "wall seconds: " << summary.wall_seconds << "\n";
      return summary.n_cells_failed == 0 ? 0 : 2;
    }
    if (spectrum_cmd->parsed()) {
      const dqc::ExperimentConfig cfg =
          load_config(config_path, seed, has_seed, out_dir);
      for (const auto& file : dqc::export_spectra(cfg, workers)) {
        std::cout << file << "\n";
      }
      return 0;
    }
    if (csr_cmd->parsed()) {
      for (const auto& file :
           dqc::csr_from_file(spectrum_file, csr_block, out_dir)) {
        std::cout << file << "\n";
      }
      return 0;
    }
    if (check_cmd->parsed()) {
      return dqc::selfcheck::run_and_report(std::cout, workers) ? 0 : 1;
    }
    if (report_cmd->parsed()) {
      for (const auto& file : dqc::emit_plot_data(manifest_path, bundle_dir)) {
        std::cout << file << "\n";
      }
      return 0;
    }
  } catch (const dqc::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 64;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
