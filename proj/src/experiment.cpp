#include "dqc/experiment.hpp"

#include "dqc/csr.hpp"
#include "dqc/io.hpp"
#include "dqc/linalg.hpp"
#include "dqc/liouville.hpp"
#include "dqc/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>

namespace dqc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["experiment"] = to_string(cfg.kind);
  if (!cfg.notes.empty()) j["notes"] = cfg.notes;
  json model;
  model["kind"] = cfg.model.kind;
  model["sites"] = cfg.model.sites;
  if (cfg.model.kind == "mbl") {
    model["w_grid"] = cfg.model.w_grid;
    model["j"] = cfg.model.j;
    model["u"] = cfg.model.u;
  } else {
    model["eta"] = cfg.model.eta;
    model["kappa"] = cfg.model.kappa;
  }
  model["gamma"] = cfg.model.gamma;
  j["model"] = model;
  j["trajectory"] = {{"dt", cfg.trajectory.dt},
                     {"transient_time", cfg.trajectory.transient_time},
                     {"run_time", cfg.trajectory.run_time}};
  j["lyapunov"] = {
      {"delta0", cfg.lyapunov.core.delta0},
      {"tau", cfg.lyapunov.core.tau},
      {"n_renorms", cfg.lyapunov.core.n_renorms},
      {"observable", cfg.lyapunov.observable},
      {"observable_seed", cfg.lyapunov.observable_seed},
      {"renorm_direction",
       cfg.lyapunov.core.renorm_direction == RenormDirection::difference
           ? "difference"
           : "random"},
      {"bisect_tol_rel", cfg.lyapunov.core.bisect_tol_rel},
      {"bisect_max_iter", cfg.lyapunov.core.bisect_max_iter},
      {"histogram_bins", cfg.lyapunov.histogram_bins}};
  j["csr"] = {{"bins", cfg.csr.bins},
              {"marginal_bins", cfg.csr.marginal_bins},
              {"stripe_halfwidth", cfg.csr.stripe_halfwidth},
              {"drop_stationary", cfg.csr.drop_stationary}};
  j["sampling"] = {{"n_disorder", cfg.sampling.n_disorder},
                   {"n_traj", cfg.sampling.n_traj},
                   {"n_observables", cfg.sampling.n_observables},
                   {"ensemble_sizes", cfg.sampling.ensemble_sizes},
                   {"master_seed", cfg.sampling.master_seed}};
  j["output"] = {{"directory", cfg.output.directory},
                 {"trace_stride", cfg.output.trace_stride}};
  return j;
}

// Cells persist as JSON files; a rerun reloads instead of recomputing.
class CellStore {
 public:
  explicit CellStore(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
  }

  std::optional<json> load(const std::string& id) const {
    const fs::path path = dir_ / (id + ".json");
    if (!fs::exists(path)) return std::nullopt;
    try {
      return io::read_json_file(path);
    } catch (const std::exception&) {
      return std::nullopt;  // partially written cell, recompute
    }
  }

  void save(const std::string& id, const json& cell) const {
    io::write_json_file(dir_ / (id + ".json"), cell);
  }

 private:
  fs::path dir_;
};

struct CellOutcome {
  std::string id;
  bool ok = true;
  bool reused = false;
  std::string error;
};

std::string w_tag(double w) {
  std::string tag = io::format_double(w);
  for (char& c : tag) {
    if (c == '.') c = 'p';
    if (c == '-') c = 'm';
  }
  return tag;
}

double fit_mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double fit_sigma(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

double fit_skewness(const std::vector<double>& xs, double mean, double sigma) {
  if (sigma == 0.0 || xs.size() < 3) return 0.0;
  double s = 0.0;
  for (double x : xs) {
    const double d = (x - mean) / sigma;
    s += d * d * d;
  }
  return s / static_cast<double>(xs.size());
}

Marginal histogram_1d(const std::vector<double>& xs, double lo, double hi,
                      int bins) {
  Marginal m;
  m.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) m.edges[b] = lo + (hi - lo) * b / bins;
  m.density.assign(bins, 0.0);
  std::int64_t total = 0;
  for (double x : xs) {
    if (x < lo || x > hi) continue;
    const int b = std::clamp(static_cast<int>((x - lo) / (hi - lo) * bins), 0,
                             bins - 1);
    m.density[b] += 1.0;
    ++total;
  }
  const double width = (hi - lo) / bins;
  if (total > 0) {
    for (double& d : m.density) d /= total * width;
  }
  return m;
}

// ----- experiment pipelines ------------------------------------------------

struct PipelineContext {
  const ExperimentConfig& cfg;
  fs::path out;
  CellStore store;
  int workers;
  std::vector<CellOutcome> outcomes;
  std::vector<std::string> artifacts;
  std::mutex outcome_mutex;

  PipelineContext(const ExperimentConfig& c, int w)
      : cfg(c), out(c.output.directory), store(out / "cells"), workers(w) {}

  void record(CellOutcome outcome) {
    std::lock_guard<std::mutex> lock(outcome_mutex);
    outcomes.push_back(std::move(outcome));
  }

  void add_artifact(const fs::path& path) {
    artifacts.push_back(fs::relative(path, out).string());
  }
};

void run_le_distribution(PipelineContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const int n_obs = cfg.sampling.n_observables;
  const int n_traj = cfg.sampling.n_traj;
  const std::uint64_t master = cfg.sampling.master_seed;

  const LindbladModel model = cfg.build_model(0.0, 0);
  std::vector<json> cells(n_obs);

  parallel_for(n_obs, ctx.workers, [&](std::size_t oi) {
    const std::string id = "obs" + std::to_string(oi);
    if (auto cached = ctx.store.load(id)) {
      cells[oi] = *cached;
      ctx.record({id, true, true, {}});
      return;
    }
    const std::uint64_t obs_seed =
        rng::derive(master, rng::Purpose::observable, {oi});
    const Matrix o = sample_goe_observable(model.dim(), obs_seed);

    json cell;
    cell["observable_seed"] = obs_seed;
    json pairs = json::array();
    bool any_failed = false;
    std::string first_error;
    for (int t = 0; t < n_traj; ++t) {
      TrajectoryConfig tcfg = cfg.trajectory;
      tcfg.seed = rng::derive(master, rng::Purpose::trajectory,
                              {oi, static_cast<std::uint64_t>(t)});
      json pair;
      pair["pair_seed"] = tcfg.seed;
      try {
        pair["lambda"] = estimate_le(model, o, tcfg, cfg.lyapunov.core).lambda;
        pair["ok"] = true;
      } catch (const std::exception& e) {
        pair["ok"] = false;
        pair["error"] = e.what();
        any_failed = true;
        if (first_error.empty()) first_error = e.what();
      }
      pairs.push_back(std::move(pair));
    }
    cell["pairs"] = std::move(pairs);
    ctx.store.save(id, cell);
    cells[oi] = std::move(cell);
    ctx.record({id, !any_failed, false, first_error});
  });

  // Aggregate.
  std::vector<double> lambdas;
  std::string rows = "observable_seed,pair_seed,lambda\n";
  for (const json& cell : cells) {
    for (const json& pair : cell.at("pairs")) {
      if (!pair.at("ok").get<bool>()) continue;
      const double lambda = pair.at("lambda").get<double>();
      lambdas.push_back(lambda);
      rows += std::to_string(cell.at("observable_seed").get<std::uint64_t>()) +
              "," + std::to_string(pair.at("pair_seed").get<std::uint64_t>()) +
              "," + io::format_double(lambda) + "\n";
    }
  }
  if (lambdas.empty()) {
    throw Error("no Lyapunov estimates survived; see manifest for errors");
  }

  const fs::path cells_csv = ctx.out / "lambdas.csv";
  io::write_text_file(cells_csv, rows);
  ctx.add_artifact(cells_csv);

  const double mean = fit_mean(lambdas);
  const double sigma = fit_sigma(lambdas, mean);
  const double lo = mean - 4.0 * (sigma > 0 ? sigma : 1.0);
  const double hi = mean + 4.0 * (sigma > 0 ? sigma : 1.0);
  const Marginal hist =
      histogram_1d(lambdas, lo, hi, cfg.lyapunov.histogram_bins);
  const fs::path hist_csv = ctx.out / "lambda_histogram.csv";
  io::write_marginal_csv(hist_csv, hist);
  ctx.add_artifact(hist_csv);

  json fit;
  fit["n"] = lambdas.size();
  fit["mean"] = mean;
  fit["sigma"] = sigma;
  fit["stderr"] = sigma / std::sqrt(static_cast<double>(lambdas.size()));
  fit["skewness"] = fit_skewness(lambdas, mean, sigma);
  const fs::path fit_json = ctx.out / "normal_fit.json";
  io::write_json_file(fit_json, fit);
  ctx.add_artifact(fit_json);
}

void run_le_sweep(PipelineContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const auto& grid = cfg.model.w_grid;
  const int n_disorder = cfg.sampling.n_disorder;
  const int n_traj = cfg.sampling.n_traj;
  const std::uint64_t master = cfg.sampling.master_seed;

  const std::size_t n_jobs = grid.size() * static_cast<std::size_t>(n_disorder);
  std::vector<json> cells(n_jobs);

  parallel_for(n_jobs, ctx.workers, [&](std::size_t job) {
    const std::size_t wi = job / n_disorder;
    const std::size_t di = job % n_disorder;
    const std::string id = "w" + w_tag(grid[wi]) + "_d" + std::to_string(di);
    if (auto cached = ctx.store.load(id)) {
      cells[job] = *cached;
      ctx.record({id, true, true, {}});
      return;
    }

    const std::uint64_t disorder_seed =
        rng::derive(master, rng::Purpose::disorder, {wi, di});
    json cell;
    cell["w"] = grid[wi];
    cell["disorder_seed"] = disorder_seed;
    json pairs = json::array();
    bool any_failed = false;
    std::string first_error;
    try {
      const LindbladModel model = cfg.build_model(grid[wi], disorder_seed);
      const Matrix o = cfg.lyapunov.observable == "model_hamiltonian"
                           ? model.hamiltonian
                           : sample_goe_observable(
                                 model.dim(), cfg.lyapunov.observable_seed);
      for (int t = 0; t < n_traj; ++t) {
        TrajectoryConfig tcfg = cfg.trajectory;
        tcfg.seed = rng::derive(master, rng::Purpose::trajectory,
                                {wi, di, static_cast<std::uint64_t>(t)});
        json pair;
        pair["pair_seed"] = tcfg.seed;
        try {
          pair["lambda"] =
              estimate_le(model, o, tcfg, cfg.lyapunov.core).lambda;
          pair["ok"] = true;
        } catch (const std::exception& e) {
          pair["ok"] = false;
          pair["error"] = e.what();
          any_failed = true;
          if (first_error.empty()) first_error = e.what();
        }
        pairs.push_back(std::move(pair));
      }
    } catch (const std::exception& e) {
      any_failed = true;
      first_error = e.what();
      cell["error"] = e.what();
    }
    cell["pairs"] = std::move(pairs);
    ctx.store.save(id, cell);
    cells[job] = std::move(cell);
    ctx.record({id, !any_failed, false, first_error});
  });

  std::string cell_rows = "W,disorder_seed,pair_seed,lambda\n";
  std::string sweep_rows = "W,mean_lambda,stderr,n_cells\n";
  for (std::size_t wi = 0; wi < grid.size(); ++wi) {
    std::vector<double> lambdas;
    for (int di = 0; di < n_disorder; ++di) {
      const json& cell = cells[wi * n_disorder + di];
      if (!cell.contains("pairs")) continue;
      for (const json& pair : cell.at("pairs")) {
        if (!pair.at("ok").get<bool>()) continue;
        const double lambda = pair.at("lambda").get<double>();
        lambdas.push_back(lambda);
        cell_rows +=
            io::format_double(grid[wi]) + "," +
            std::to_string(cell.at("disorder_seed").get<std::uint64_t>()) +
            "," + std::to_string(pair.at("pair_seed").get<std::uint64_t>()) +
            "," + io::format_double(lambda) + "\n";
      }
    }
    const double mean = lambdas.empty() ? 0.0 : fit_mean(lambdas);
    const double sigma = lambdas.empty() ? 0.0 : fit_sigma(lambdas, mean);
    const double se =
        lambdas.size() > 1 ? sigma / std::sqrt(static_cast<double>(lambdas.size()))
                           : 0.0;
    sweep_rows += io::format_double(grid[wi]) + "," + io::format_double(mean) +
                  "," + io::format_double(se) + "," +
                  std::to_string(lambdas.size()) + "\n";
  }

  const fs::path sweep_csv = ctx.out / "sweep.csv";
  io::write_text_file(sweep_csv, sweep_rows);
  ctx.add_artifact(sweep_csv);
  const fs::path cells_csv = ctx.out / "cells.csv";
  io::write_text_file(cells_csv, cell_rows);
  ctx.add_artifact(cells_csv);
}

void run_csr_experiment(PipelineContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const auto& grid = cfg.model.w_grid;
  const int n_disorder = cfg.sampling.n_disorder;
  const std::uint64_t master = cfg.sampling.master_seed;

  const std::size_t n_jobs = grid.size() * static_cast<std::size_t>(n_disorder);
  std::vector<json> cells(n_jobs);

  parallel_for(n_jobs, ctx.workers, [&](std::size_t job) {
    const std::size_t wi = job / n_disorder;
    const std::size_t di = job % n_disorder;
    const std::string id = "w" + w_tag(grid[wi]) + "_d" + std::to_string(di);
    if (auto cached = ctx.store.load(id)) {
      cells[job] = *cached;
      ctx.record({id, true, true, {}});
      return;
    }

    const std::uint64_t disorder_seed =
        rng::derive(master, rng::Purpose::disorder, {wi, di});
    json cell;
    cell["w"] = grid[wi];
    cell["disorder_seed"] = disorder_seed;
    try {
      const LindbladModel model = cfg.build_model(grid[wi], disorder_seed);
      Spectrum spec = spectrum(build_superoperator(model));
      if (cfg.csr.drop_stationary) {
        auto& ev = spec.eigenvalues;
        const auto nearest_zero = std::min_element(
            ev.begin(), ev.end(), [](const Complex& a, const Complex& b) {
              return std::norm(a) < std::norm(b);
            });
        ev.erase(nearest_zero);
      }
      const std::vector<CsrSample> samples = csr_values(spec);
      json z_re = json::array(), z_im = json::array();
      std::int64_t degenerate = 0;
      for (const auto& s : samples) {
        if (s.degenerate) {
          ++degenerate;
          continue;
        }
        z_re.push_back(s.z.real());
        z_im.push_back(s.z.imag());
      }
      cell["z_re"] = std::move(z_re);
      cell["z_im"] = std::move(z_im);
      cell["n_degenerate"] = degenerate;
      ctx.record({id, true, false, {}});
    } catch (const std::exception& e) {
      cell["error"] = e.what();
      ctx.record({id, false, false, e.what()});
    }
    ctx.store.save(id, cell);
    cells[job] = std::move(cell);
  });

  for (std::size_t wi = 0; wi < grid.size(); ++wi) {
    std::vector<CsrSample> pooled;
    std::int64_t degenerate = 0;
    for (int di = 0; di < n_disorder; ++di) {
      const json& cell = cells[wi * n_disorder + di];
      if (!cell.contains("z_re")) continue;
      const auto& re = cell.at("z_re");
      const auto& im = cell.at("z_im");
      for (std::size_t k = 0; k < re.size(); ++k) {
        CsrSample s;
        s.z = Complex(re[k].get<double>(), im[k].get<double>());
        pooled.push_back(s);
      }
      degenerate += cell.at("n_degenerate").get<std::int64_t>();
    }
    if (pooled.empty()) continue;

    const std::string tag = w_tag(grid[wi]);
    const fs::path hist_csv = ctx.out / ("csr_w" + tag + "_histogram.csv");
    io::write_histogram_csv(hist_csv, csr_histogram(pooled, cfg.csr.bins));
    ctx.add_artifact(hist_csv);

    const fs::path radial_csv = ctx.out / ("csr_w" + tag + "_radial.csv");
    io::write_marginal_csv(radial_csv,
                           radial_marginal(pooled, cfg.csr.marginal_bins));
    ctx.add_artifact(radial_csv);

    const fs::path angular_csv = ctx.out / ("csr_w" + tag + "_angular.csv");
    io::write_marginal_csv(angular_csv,
                           angular_marginal(pooled, cfg.csr.marginal_bins));
    ctx.add_artifact(angular_csv);

    const fs::path section_csv = ctx.out / ("csr_w" + tag + "_section.csv");
    io::write_marginal_csv(
        section_csv, real_axis_section(pooled, cfg.csr.stripe_halfwidth,
                                       cfg.csr.marginal_bins));
    ctx.add_artifact(section_csv);

    const SummaryStats st = summary_stats(pooled);
    json summary;
    summary["w"] = grid[wi];
    summary["n_samples"] = st.n_samples;
    summary["n_degenerate"] = degenerate;
    summary["mean_r"] = st.mean_r;
    summary["mean_cos_theta"] = st.mean_cos_theta;
    const fs::path summary_json = ctx.out / ("csr_w" + tag + "_summary.json");
    io::write_json_file(summary_json, summary);
    ctx.add_artifact(summary_json);
  }
}

void run_trajectory_trace(PipelineContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const std::uint64_t master = cfg.sampling.master_seed;
  const double w = cfg.model.w_grid.empty() ? 0.0 : cfg.model.w_grid.front();
  const std::uint64_t disorder_seed =
      rng::derive(master, rng::Purpose::disorder, {0, 0});
  const LindbladModel model = cfg.build_model(w, disorder_seed);
  const Matrix o = cfg.lyapunov.observable == "model_hamiltonian"
                       ? model.hamiltonian
                       : sample_goe_observable(model.dim(),
                                               cfg.lyapunov.observable_seed);

  TrajectoryConfig tcfg = cfg.trajectory;
  tcfg.seed = rng::derive(master, rng::Purpose::trajectory, {0, 0, 0});

  std::string trace = "t,norm_sq,o_t,jump_flag\n";
  std::string pair_trace = "t,delta,jump_flag_base,jump_flag_pert,renorm_flag\n";
  const int stride = cfg.output.trace_stride;
  long long step_count = 0;
  const PairObserver observer = [&](const PairStepSample& s) {
    if (s.renorm || (step_count++ % stride == 0)) {
      trace += io::format_double(s.t) + "," +
               io::format_double(s.base_norm_sq) + "," +
               io::format_double(s.base_obs) + "," +
               (s.jump_base ? "1" : "0") + "\n";
      pair_trace += io::format_double(s.t) + "," + io::format_double(s.delta) +
                    "," + (s.jump_base ? "1" : "0") + "," +
                    (s.jump_pert ? "1" : "0") + "," + (s.renorm ? "1" : "0") +
                    "\n";
    }
  };

  const LyapunovEstimate est =
      estimate_le(model, o, tcfg, cfg.lyapunov.core, observer);

  const fs::path trace_csv = ctx.out / "trace.csv";
  io::write_text_file(trace_csv, trace);
  ctx.add_artifact(trace_csv);
  const fs::path pair_csv = ctx.out / "pair_trace.csv";
  io::write_text_file(pair_csv, pair_trace);
  ctx.add_artifact(pair_csv);

  std::string growth = "k,t_k,delta,d_k,log_dk\n";
  for (const auto& rec : est.records) {
    growth += std::to_string(rec.k) + "," + io::format_double(rec.t_k) + "," +
              io::format_double(rec.delta_tk) + "," +
              io::format_double(rec.d_k) + "," +
              io::format_double(rec.log_dk) + "\n";
  }
  const fs::path growth_csv = ctx.out / "growth.csv";
  io::write_text_file(growth_csv, growth);
  ctx.add_artifact(growth_csv);

  json summary;
  summary["lambda"] = est.lambda;
  summary["model"] = est.model_label;
  summary["pair_seed"] = est.pair_seed;
  const fs::path summary_json = ctx.out / "trace_summary.json";
  io::write_json_file(summary_json, summary);
  ctx.add_artifact(summary_json);
  ctx.record({"pair0", true, false, {}});
}

void run_unraveling_check(PipelineContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const std::uint64_t master = cfg.sampling.master_seed;
  const double w = cfg.model.w_grid.front();
  const std::uint64_t disorder_seed =
      rng::derive(master, rng::Purpose::disorder, {0, 0});
  const LindbladModel model = cfg.build_model(w, disorder_seed);

  std::vector<int> sizes = cfg.sampling.ensemble_sizes;
  std::sort(sizes.begin(), sizes.end());
  const int n_max = sizes.back();

  json cell;
  const std::string id = "ensemble";
  if (auto cached = ctx.store.load(id)) {
    cell = *cached;
    ctx.record({id, true, true, {}});
  } else {
    const EffectiveHamiltonian heff = effective_hamiltonian(model);
    const Matrix propagator =
        matexp(Complex(0, -1) * heff.matrix, cfg.trajectory.dt);

    std::vector<PureState> snapshots(n_max);
    parallel_for(n_max, ctx.workers, [&](std::size_t i) {
      rng::Stream stream(rng::derive(master, rng::Purpose::trajectory,
                                     {0, 0, static_cast<std::uint64_t>(i)}));
      TrajectoryEngine engine(model, propagator, cfg.trajectory.dt,
                              neel_state(model.basis), std::move(stream));
      engine.advance(cfg.trajectory.run_time);
      snapshots[i] = engine.normalized_state();
    });

    const PureState psi0 = neel_state(model.basis);
    const Matrix rho0 = psi0.amplitudes * psi0.amplitudes.adjoint();
    const Matrix rho_exact =
        evolve_density(model, rho0, cfg.trajectory.run_time, cfg.trajectory.dt);

    cell["t"] = cfg.trajectory.run_time;
    cell["model"] = model.label;
    json entries = json::array();
    Matrix sum = Matrix::Zero(model.dim(), model.dim());
    int used = 0;
    for (int n : sizes) {
      for (; used < n; ++used) {
        sum.noalias() += snapshots[used].amplitudes *
                         snapshots[used].amplitudes.adjoint();
      }
      const Matrix avg = sum / static_cast<double>(n);
      json entry;
      entry["n"] = n;
      entry["trace_distance"] = trace_distance(avg, rho_exact);
      entries.push_back(std::move(entry));
    }
    cell["entries"] = std::move(entries);
    ctx.store.save(id, cell);
    ctx.record({id, true, false, {}});
  }

  json result = cell;
  const auto& entries = result.at("entries");
  if (entries.size() >= 2) {
    const double first = entries.front().at("trace_distance").get<double>();
    const double last = entries.back().at("trace_distance").get<double>();
    result["ratio_first_to_last"] = last > 0.0 ? first / last : 0.0;
  }
  const fs::path out_json = ctx.out / "unraveling.json";
  io::write_json_file(out_json, result);
  ctx.add_artifact(out_json);
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg, int workers) {
  const auto t_start = std::chrono::steady_clock::now();
  PipelineContext ctx(cfg, workers);
  fs::create_directories(ctx.out);

  // Provisional manifest first: a crashed run still names its config and
  // whatever cells had been stored by then.
  const fs::path manifest_path = ctx.out / "manifest.json";
  json manifest;
  manifest["schema_version"] = 1;
  manifest["code_version"] = kCodeVersion;
  manifest["status"] = "running";
  manifest["experiment"] = to_string(cfg.kind);
  manifest["config"] = config_to_json(cfg);
  manifest["master_seed"] = cfg.sampling.master_seed;
  io::write_json_file(manifest_path, manifest);

  switch (cfg.kind) {
    case ExperimentKind::le_distribution: run_le_distribution(ctx); break;
    case ExperimentKind::le_sweep: run_le_sweep(ctx); break;
    case ExperimentKind::csr_experiment: run_csr_experiment(ctx); break;
    case ExperimentKind::trajectory_trace: run_trajectory_trace(ctx); break;
    case ExperimentKind::unraveling_check: run_unraveling_check(ctx); break;
  }

  RunSummary summary;
  summary.manifest_path = manifest_path;
  summary.n_cells_total = static_cast<int>(ctx.outcomes.size());

  std::sort(ctx.outcomes.begin(), ctx.outcomes.end(),
            [](const CellOutcome& a, const CellOutcome& b) {
              return a.id < b.id;
            });
  json cells = json::array();
  for (const auto& outcome : ctx.outcomes) {
    json c;
    c["id"] = outcome.id;
    c["status"] = outcome.ok ? (outcome.reused ? "reused" : "done") : "failed";
    if (!outcome.ok) {
      c["error"] = outcome.error;
      ++summary.n_cells_failed;
    }
    if (outcome.reused) ++summary.n_cells_reused;
    cells.push_back(std::move(c));
  }

  const auto t_end = std::chrono::steady_clock::now();
  summary.wall_seconds =
      std::chrono::duration<double>(t_end - t_start).count();
  summary.artifacts = ctx.artifacts;

  manifest["status"] = summary.n_cells_failed == 0 ? "complete" : "partial";
  manifest["cells"] = std::move(cells);
  manifest["artifacts"] = ctx.artifacts;
  manifest["wall_seconds"] = summary.wall_seconds;
  io::write_json_file(manifest_path, manifest);
  return summary;
}

std::vector<std::string> emit_plot_data(const fs::path& manifest_path,
                                        const fs::path& bundle_dir) {
  const json manifest = io::read_json_file(manifest_path);
  const fs::path run_dir = manifest_path.parent_path();
  const std::string kind = manifest.at("experiment").get<std::string>();

  std::vector<std::string> missing;
  for (const auto& artifact : manifest.at("artifacts")) {
    if (!fs::exists(run_dir / artifact.get<std::string>())) {
      missing.push_back(artifact.get<std::string>());
    }
  }
  if (!missing.empty()) {
    std::string msg = "missing artifacts:";
    for (const auto& m : missing) msg += " " + m;
    throw Error(msg);
  }

  fs::create_directories(bundle_dir);
  std::vector<std::string> written;
  auto copy_in = [&](const std::string& name) {
    fs::copy_file(run_dir / name, bundle_dir / fs::path(name).filename(),
                  fs::copy_options::overwrite_existing);
    written.push_back((bundle_dir / fs::path(name).filename()).string());
  };

  json descriptor;
  descriptor["experiment"] = kind;
  descriptor["code_version"] = manifest.at("code_version");

  if (kind == "le_distribution") {
    descriptor["axes"] = {{"x", "lambda"}, {"y", "density"}};
    descriptor["files"] = {"lambda_histogram.csv", "normal_fit.json"};
    copy_in("lambda_histogram.csv");
    copy_in("normal_fit.json");
  } else if (kind == "le_sweep") {
    descriptor["axes"] = {{"x", "W"}, {"y", "mean_lambda"}, {"yerr", "stderr"}};
    descriptor["files"] = {"sweep.csv", "cells.csv"};
    copy_in("sweep.csv");
    copy_in("cells.csv");
  } else if (kind == "csr_experiment") {
    descriptor["axes"] = {{"x", "Re z"}, {"y", "Im z"}, {"value", "density"}};
    json files = json::array();
    for (const auto& artifact : manifest.at("artifacts")) {
      const std::string name = artifact.get<std::string>();
      files.push_back(name);
      copy_in(name);
    }
    descriptor["files"] = std::move(files);
  } else if (kind == "trajectory_trace") {
    descriptor["axes"] = {{"x", "t"}, {"y", "delta"}};
    descriptor["files"] = {"trace.csv", "pair_trace.csv", "growth.csv",
                           "trace_summary.json"};
    copy_in("trace.csv");
    copy_in("pair_trace.csv");
    copy_in("growth.csv");
    copy_in("trace_summary.json");
  } else if (kind == "unraveling_check") {
    descriptor["axes"] = {{"x", "n"}, {"y", "trace_distance"}};
    descriptor["files"] = {"unraveling.json"};
    copy_in("unraveling.json");
  } else {
    throw Error("unknown experiment kind in manifest: " + kind);
  }

  const fs::path desc_path = bundle_dir / "descriptor.json";
  io::write_json_file(desc_path, descriptor);
  written.push_back(desc_path.string());
  return written;
}

std::vector<std::string> export_spectra(const ExperimentConfig& cfg,
                                        int workers) {
  const fs::path out = fs::path(cfg.output.directory) / "spectra";
  fs::create_directories(out);
  const std::uint64_t master = cfg.sampling.master_seed;
  std::vector<std::string> written;
  std::mutex written_mutex;

  if (cfg.model.kind == "integrable") {
    const LindbladModel model = cfg.build_model(0.0, 0);
    const Spectrum spec = spectrum(build_superoperator(model));
    const fs::path csv = out / "spectrum_integrable.csv";
    io::write_spectrum_csv(csv, spec);
    json sidecar;
    sidecar["model"] = model.label;
    sidecar["sites"] = cfg.model.sites;
    sidecar["gamma"] = cfg.model.gamma;
    io::write_json_file(out / "spectrum_integrable.json", sidecar);
    written.push_back(csv.string());
    return written;
  }

  const auto& grid = cfg.model.w_grid;
  const int n_disorder = cfg.sampling.n_disorder;
  const std::size_t n_jobs = grid.size() * static_cast<std::size_t>(n_disorder);
  parallel_for(n_jobs, workers, [&](std::size_t job) {
    const std::size_t wi = job / n_disorder;
    const std::size_t di = job % n_disorder;
    const std::uint64_t disorder_seed =
        rng::derive(master, rng::Purpose::disorder, {wi, di});
    const LindbladModel model = cfg.build_model(grid[wi], disorder_seed);
    const Spectrum spec = spectrum(build_superoperator(model));
    const std::string stem =
        "spectrum_w" + w_tag(grid[wi]) + "_d" + std::to_string(di);
    const fs::path csv = out / (stem + ".csv");
    io::write_spectrum_csv(csv, spec);
    json sidecar;
    sidecar["model"] = model.label;
    sidecar["sites"] = cfg.model.sites;
    sidecar["w"] = grid[wi];
    sidecar["gamma"] = cfg.model.gamma;
    sidecar["disorder_seed"] = disorder_seed;
    io::write_json_file(out / (stem + ".json"), sidecar);
    std::lock_guard<std::mutex> lock(written_mutex);
    written.push_back(csv.string());
  });
  std::sort(written.begin(), written.end());
  return written;
}

std::vector<std::string> csr_from_file(const fs::path& spectrum_csv,
                                       const CsrBlock& block,
                                       const fs::path& out_dir) {
  Spectrum spec = io::read_spectrum_csv(spectrum_csv);
  if (block.drop_stationary && spec.eigenvalues.size() > 3) {
    auto& ev = spec.eigenvalues;
    const auto nearest_zero = std::min_element(
        ev.begin(), ev.end(), [](const Complex& a, const Complex& b) {
          return std::norm(a) < std::norm(b);
        });
    ev.erase(nearest_zero);
  }
  const std::vector<CsrSample> samples = csr_values(spec);

  fs::create_directories(out_dir);
  std::vector<std::string> written;

  const fs::path hist_csv = out_dir / "csr_histogram.csv";
  io::write_histogram_csv(hist_csv, csr_histogram(samples, block.bins));
  written.push_back(hist_csv.string());

  const fs::path radial_csv = out_dir / "csr_radial.csv";
  io::write_marginal_csv(radial_csv,
                         radial_marginal(samples, block.marginal_bins));
  written.push_back(radial_csv.string());

  const fs::path angular_csv = out_dir / "csr_angular.csv";
  io::write_marginal_csv(angular_csv,
                         angular_marginal(samples, block.marginal_bins));
  written.push_back(angular_csv.string());

  const fs::path section_csv = out_dir / "csr_section.csv";
  io::write_marginal_csv(section_csv,
                         real_axis_section(samples, block.stripe_halfwidth,
                                           block.marginal_bins));
  written.push_back(section_csv.string());

  const SummaryStats st = summary_stats(samples);
  json summary;
  summary["source"] = spectrum_csv.filename().string();
  summary["n_samples"] = st.n_samples;
  summary["n_degenerate"] = st.n_degenerate;
  summary["mean_r"] = st.mean_r;
  summary["mean_cos_theta"] = st.mean_cos_theta;
  const fs::path summary_json = out_dir / "csr_summary.json";
  io::write_json_file(summary_json, summary);
  written.push_back(summary_json.string());
  return written;
}

}  // namespace dqc
