#include "dqc/config.hpp"

#include <json.hpp>

#include <cmath>
#include <set>

namespace dqc {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error(join(issues)), issues_(std::move(issues)) {}

std::string ConfigError::join(const std::vector<std::string>& issues) {
  std::string msg = "invalid config:";
  for (const auto& issue : issues) {
    msg += "\n  - " + issue;
  }
  return msg;
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::le_distribution: return "le_distribution";
    case ExperimentKind::le_sweep: return "le_sweep";
    case ExperimentKind::csr_experiment: return "csr_experiment";
    case ExperimentKind::trajectory_trace: return "trajectory_trace";
    case ExperimentKind::unraveling_check: return "unraveling_check";
  }
  throw Error("unreachable experiment kind");
}

LindbladModel ExperimentConfig::build_model(double w,
                                            std::uint64_t disorder_seed) const {
  if (model.kind == "integrable") {
    return build_integrable_chain(model.sites, model.eta, model.kappa,
                                  model.gamma);
  }
  const DisorderRealization disorder = sample_disorder(model.sites, disorder_seed);
  return build_mbl_chain(model.sites, w, model.j, model.u, model.gamma,
                         disorder);
}

namespace {

class Validator {
 public:
  std::vector<std::string> issues;

  void expect_keys(const json& obj, const std::string& where,
                   const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
      if (!allowed.contains(key)) {
        issues.push_back(where + ": unknown key '" + key + "'");
      }
    }
  }

  template <typename T>
  void read(const json& obj, const std::string& where, const std::string& key,
            T& target) {
    if (!obj.contains(key)) return;
    try {
      target = obj.at(key).get<T>();
    } catch (const json::exception&) {
      issues.push_back(where + "." + key + ": wrong type");
    }
  }

  void fail(const std::string& issue) { issues.push_back(issue); }
};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("syntax error: ") + e.what()});
  }
  if (!root.is_object()) {
    throw ConfigError({"top level must be an object"});
  }

  Validator v;
  ExperimentConfig cfg;

  v.expect_keys(root, "top",
                {"schema_version", "experiment", "notes", "model",
                 "trajectory", "lyapunov", "csr", "sampling", "output"});

  v.read(root, "top", "schema_version", cfg.schema_version);
  if (cfg.schema_version != 1) {
    v.fail("schema_version: only version 1 is supported");
  }

  std::string kind_text;
  if (!root.contains("experiment")) {
    v.fail("experiment: required");
  } else {
    v.read(root, "top", "experiment", kind_text);
    if (kind_text == "le_distribution") cfg.kind = ExperimentKind::le_distribution;
    else if (kind_text == "le_sweep") cfg.kind = ExperimentKind::le_sweep;
    else if (kind_text == "csr_experiment") cfg.kind = ExperimentKind::csr_experiment;
    else if (kind_text == "trajectory_trace") cfg.kind = ExperimentKind::trajectory_trace;
    else if (kind_text == "unraveling_check") cfg.kind = ExperimentKind::unraveling_check;
    else v.fail("experiment: unknown kind '" + kind_text + "'");
  }

  v.read(root, "top", "notes", cfg.notes);

  // --- model ---
  if (!root.contains("model") || !root["model"].is_object()) {
    v.fail("model: required object");
  } else {
    const json& m = root["model"];
    v.expect_keys(m, "model",
                  {"kind", "sites", "w", "w_grid", "j", "u", "gamma", "eta",
                   "kappa"});
    v.read(m, "model", "kind", cfg.model.kind);
    v.read(m, "model", "sites", cfg.model.sites);
    v.read(m, "model", "j", cfg.model.j);
    v.read(m, "model", "u", cfg.model.u);
    v.read(m, "model", "eta", cfg.model.eta);
    v.read(m, "model", "kappa", cfg.model.kappa);

    if (cfg.model.kind != "integrable" && cfg.model.kind != "mbl") {
      v.fail("model.kind: must be 'integrable' or 'mbl'");
    }
    cfg.model.gamma = cfg.model.kind == "integrable" ? 1.0 : 0.1;
    v.read(m, "model", "gamma", cfg.model.gamma);

    if (m.contains("w") && m.contains("w_grid")) {
      v.fail("model: give either w or w_grid, not both");
    }
    if (m.contains("w")) {
      double w = 0.0;
      v.read(m, "model", "w", w);
      cfg.model.w_grid = {w};
    }
    if (m.contains("w_grid")) {
      v.read(m, "model", "w_grid", cfg.model.w_grid);
    }

    if (cfg.model.kind == "integrable") {
      if (cfg.model.sites < 2 || cfg.model.sites > 10) {
        v.fail("model.sites: integrable chain needs 2..10 sites");
      }
      if (cfg.model.eta != 1 && cfg.model.eta != -1) {
        v.fail("model.eta: must be +1 or -1");
      }
      if (cfg.model.kappa != 1 && cfg.model.kappa != -1) {
        v.fail("model.kappa: must be +1 or -1");
      }
      if (m.contains("w") || m.contains("w_grid")) {
        v.fail("model: disorder strength applies to the mbl kind only");
      }
    } else if (cfg.model.kind == "mbl") {
      if (cfg.model.sites < 2 || cfg.model.sites % 2 != 0) {
        v.fail("model.sites: mbl chain needs an even site count >= 2");
      }
      if (cfg.model.w_grid.empty()) {
        v.fail("model: mbl experiments need w or w_grid");
      }
      for (double w : cfg.model.w_grid) {
        if (w < 0.0) v.fail("model.w_grid: disorder strength must be >= 0");
      }
    }
    if (!(cfg.model.gamma > 0.0)) {
      v.fail("model.gamma: must be positive");
    }
  }

  // --- trajectory ---
  cfg.trajectory.transient_time = 100.0;
  if (root.contains("trajectory")) {
    const json& t = root["trajectory"];
    if (!t.is_object()) {
      v.fail("trajectory: must be an object");
    } else {
      v.expect_keys(t, "trajectory",
                    {"dt", "transient_time", "run_time"});
      v.read(t, "trajectory", "dt", cfg.trajectory.dt);
      v.read(t, "trajectory", "transient_time", cfg.trajectory.transient_time);
      v.read(t, "trajectory", "run_time", cfg.trajectory.run_time);
    }
  }
  if (!(cfg.trajectory.dt > 0.0)) v.fail("trajectory.dt: must be positive");
  if (cfg.trajectory.transient_time < 0.0) {
    v.fail("trajectory.transient_time: must be >= 0");
  }
  if (cfg.trajectory.run_time < 0.0) {
    v.fail("trajectory.run_time: must be >= 0");
  }

  // --- lyapunov ---
  cfg.lyapunov.core.tau = cfg.model.kind == "mbl" ? 10.0 : 5.0;
  const bool needs_lyapunov = cfg.kind == ExperimentKind::le_distribution ||
                              cfg.kind == ExperimentKind::le_sweep ||
                              cfg.kind == ExperimentKind::trajectory_trace;
  if (root.contains("lyapunov")) {
    const json& l = root["lyapunov"];
    if (!l.is_object()) {
      v.fail("lyapunov: must be an object");
    } else {
      v.expect_keys(l, "lyapunov",
                    {"delta0", "tau", "n_renorms", "observable",
                     "observable_seed", "renorm_direction", "bisect_tol_rel",
                     "bisect_max_iter", "histogram_bins"});
      v.read(l, "lyapunov", "delta0", cfg.lyapunov.core.delta0);
      v.read(l, "lyapunov", "tau", cfg.lyapunov.core.tau);
      v.read(l, "lyapunov", "n_renorms", cfg.lyapunov.core.n_renorms);
      v.read(l, "lyapunov", "observable", cfg.lyapunov.observable);
      v.read(l, "lyapunov", "observable_seed", cfg.lyapunov.observable_seed);
      v.read(l, "lyapunov", "bisect_tol_rel", cfg.lyapunov.core.bisect_tol_rel);
      v.read(l, "lyapunov", "bisect_max_iter", cfg.lyapunov.core.bisect_max_iter);
      v.read(l, "lyapunov", "histogram_bins", cfg.lyapunov.histogram_bins);
      std::string direction = "difference";
      v.read(l, "lyapunov", "renorm_direction", direction);
      if (direction == "difference") {
        cfg.lyapunov.core.renorm_direction = RenormDirection::difference;
      } else if (direction == "random") {
        cfg.lyapunov.core.renorm_direction = RenormDirection::random;
      } else {
        v.fail("lyapunov.renorm_direction: must be 'difference' or 'random'");
      }
    }
  }
  if (needs_lyapunov) {
    if (!(cfg.lyapunov.core.delta0 > 0.0)) {
      v.fail("lyapunov.delta0: must be positive");
    }
    if (!(cfg.lyapunov.core.tau >= 10.0 * cfg.trajectory.dt)) {
      v.fail("lyapunov.tau: must be at least ten trajectory steps");
    }
    if (cfg.lyapunov.core.n_renorms < 1) {
      v.fail("lyapunov.n_renorms: must be >= 1");
    }
    if (cfg.lyapunov.observable != "model_hamiltonian" &&
        cfg.lyapunov.observable != "goe_random") {
      v.fail("lyapunov.observable: must be 'model_hamiltonian' or 'goe_random'");
    }
    if (cfg.lyapunov.histogram_bins < 2) {
      v.fail("lyapunov.histogram_bins: must be >= 2");
    }
    const double steps = cfg.lyapunov.core.tau / cfg.trajectory.dt;
    if (std::abs(steps - std::round(steps)) > 1e-9) {
      v.fail("lyapunov.tau: must be an integral number of trajectory steps");
    }
  }

  // --- csr ---
  if (root.contains("csr")) {
    const json& c = root["csr"];
    if (!c.is_object()) {
      v.fail("csr: must be an object");
    } else {
      v.expect_keys(c, "csr",
                    {"bins", "marginal_bins", "stripe_halfwidth",
                     "drop_stationary"});
      v.read(c, "csr", "bins", cfg.csr.bins);
      v.read(c, "csr", "marginal_bins", cfg.csr.marginal_bins);
      v.read(c, "csr", "stripe_halfwidth", cfg.csr.stripe_halfwidth);
      v.read(c, "csr", "drop_stationary", cfg.csr.drop_stationary);
    }
  }
  if (cfg.csr.bins < 2) v.fail("csr.bins: must be >= 2");
  if (cfg.csr.marginal_bins < 2) v.fail("csr.marginal_bins: must be >= 2");
  if (!(cfg.csr.stripe_halfwidth > 0.0)) {
    v.fail("csr.stripe_halfwidth: must be positive");
  }

  // --- sampling ---
  if (root.contains("sampling")) {
    const json& s = root["sampling"];
    if (!s.is_object()) {
      v.fail("sampling: must be an object");
    } else {
      v.expect_keys(s, "sampling",
                    {"n_disorder", "n_traj", "n_observables", "ensemble_sizes",
                     "master_seed"});
      v.read(s, "sampling", "n_disorder", cfg.sampling.n_disorder);
      v.read(s, "sampling", "n_traj", cfg.sampling.n_traj);
      v.read(s, "sampling", "n_observables", cfg.sampling.n_observables);
      v.read(s, "sampling", "ensemble_sizes", cfg.sampling.ensemble_sizes);
      v.read(s, "sampling", "master_seed", cfg.sampling.master_seed);
    }
  }
  if (cfg.sampling.n_disorder < 1) v.fail("sampling.n_disorder: must be >= 1");
  if (cfg.sampling.n_traj < 1) v.fail("sampling.n_traj: must be >= 1");
  if (cfg.sampling.n_observables < 1) {
    v.fail("sampling.n_observables: must be >= 1");
  }
  if (cfg.kind == ExperimentKind::unraveling_check) {
    if (cfg.sampling.ensemble_sizes.empty()) {
      v.fail("sampling.ensemble_sizes: must be non-empty");
    }
    for (int n : cfg.sampling.ensemble_sizes) {
      if (n < 1) v.fail("sampling.ensemble_sizes: entries must be >= 1");
    }
    if (!(cfg.trajectory.run_time > 0.0)) {
      v.fail("trajectory.run_time: unraveling check needs a positive time");
    }
  }
  if (cfg.kind == ExperimentKind::trajectory_trace &&
      !(cfg.trajectory.run_time > 0.0)) {
    v.fail("trajectory.run_time: trace needs a positive time");
  }

  // --- output ---
  if (root.contains("output")) {
    const json& o = root["output"];
    if (!o.is_object()) {
      v.fail("output: must be an object");
    } else {
      v.expect_keys(o, "output", {"directory", "trace_stride"});
      v.read(o, "output", "directory", cfg.output.directory);
      v.read(o, "output", "trace_stride", cfg.output.trace_stride);
    }
  }
  if (cfg.output.trace_stride < 1) v.fail("output.trace_stride: must be >= 1");
  if (cfg.output.directory.empty()) v.fail("output.directory: must be non-empty");

  if (cfg.kind == ExperimentKind::le_distribution &&
      cfg.model.kind == "mbl") {
    v.fail("le_distribution: expects the integrable model");
  }
  if ((cfg.kind == ExperimentKind::le_sweep ||
       cfg.kind == ExperimentKind::csr_experiment ||
       cfg.kind == ExperimentKind::unraveling_check) &&
      cfg.model.kind != "mbl") {
    v.fail(to_string(cfg.kind) + ": expects the mbl model");
  }
  if (cfg.kind == ExperimentKind::le_distribution &&
      cfg.lyapunov.observable == "model_hamiltonian") {
    v.fail("le_distribution: H vanishes for the integrable model; use goe_random");
  }

  if (!v.issues.empty()) {
    throw ConfigError(std::move(v.issues));
  }
  return cfg;
}

}  // namespace dqc
