#pragma once

#include "dqc/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dqc {

inline constexpr const char* kCodeVersion = "0.1.0";

struct RunSummary {
  std::filesystem::path manifest_path;
  std::vector<std::string> artifacts;
  int n_cells_total = 0;
  int n_cells_failed = 0;
  int n_cells_reused = 0;
  double wall_seconds = 0.0;
};

// Dispatches a validated config to its pipeline. Cell results are persisted
// under <out>/cells as they complete, so a rerun resumes instead of
// recomputing; failed cells are quarantined and listed in the manifest.
RunSummary run_experiment(const ExperimentConfig& cfg, int workers);

// Repackages a finished run into per-figure bundles (CSV plus a small JSON
// descriptor naming axes and labels).
std::vector<std::string> emit_plot_data(
    const std::filesystem::path& manifest_path,
    const std::filesystem::path& bundle_dir);

// Model spectra to CSV with a JSON sidecar per realization.
std::vector<std::string> export_spectra(const ExperimentConfig& cfg,
                                        int workers);

// CSR statistics of an eigenvalue CSV file.
std::vector<std::string> csr_from_file(const std::filesystem::path& spectrum_csv,
                                       const CsrBlock& block,
                                       const std::filesystem::path& out_dir);

}  // namespace dqc
