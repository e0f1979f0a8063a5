#pragma once

#include "dqc/lyapunov.hpp"
#include "dqc/unravel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dqc {

// Every validation problem found in a config, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues);
  std::vector<std::string> issues_;
};

enum class ExperimentKind {
  le_distribution,
  le_sweep,
  csr_experiment,
  trajectory_trace,
  unraveling_check,
};

std::string to_string(ExperimentKind kind);

struct ModelConfig {
  std::string kind;  // "integrable" | "mbl"
  int sites = 0;
  std::vector<double> w_grid;  // mbl; single-element grid for fixed W
  double j = 1.0;
  double u = 1.0;
  double gamma = 0.0;  // defaulted per kind when absent
  int eta = 1;
  int kappa = -1;
};

struct LyapunovBlock {
  LyapunovConfig core;
  std::string observable = "model_hamiltonian";  // or "goe_random"
  std::uint64_t observable_seed = 0;
  int histogram_bins = 25;
};

struct CsrBlock {
  int bins = 25;
  int marginal_bins = 40;
  double stripe_halfwidth = 0.05;
  bool drop_stationary = false;
};

struct SamplingBlock {
  int n_disorder = 1;
  int n_traj = 1;
  int n_observables = 1;
  std::vector<int> ensemble_sizes = {500, 2000};
  std::uint64_t master_seed = 1;
};

struct OutputBlock {
  std::string directory = "out";
  int trace_stride = 10;
};

struct ExperimentConfig {
  int schema_version = 1;
  ExperimentKind kind = ExperimentKind::le_sweep;
  std::string notes;
  ModelConfig model;
  TrajectoryConfig trajectory;
  LyapunovBlock lyapunov;
  CsrBlock csr;
  SamplingBlock sampling;
  OutputBlock output;

  LindbladModel build_model(double w, std::uint64_t disorder_seed) const;
};

ExperimentConfig parse_config(const std::string& text);

}  // namespace dqc
