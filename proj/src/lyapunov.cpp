#include "dqc/lyapunov.hpp"

#include "dqc/linalg.hpp"
#include "dqc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dqc {

Vector random_direction(Index dim, rng::Stream& stream) {
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) {
    v(i) = stream.uniform(-1.0, 1.0);
  }
  const double norm = v.norm();
  if (norm == 0.0) return random_direction(dim, stream);
  return v / norm;
}

PureState apply_perturbation(const PureState& base, const Vector& unit_dir,
                             double eps) {
  Vector v = base.amplitudes + eps * unit_dir;
  const double vnorm = v.norm();
  if (vnorm < 1e-300) {
    throw NumericError("perturbed state collapsed to zero");
  }
  PureState out(std::move(v));
  out.amplitudes *= base.norm() / out.norm();
  out.norm_sq = base.norm_sq;
  return out;
}

namespace {

double observable_distance(const Matrix& o, double o_base,
                           const PureState& base, const Vector& unit_dir,
                           double eps) {
  const PureState moved = apply_perturbation(base, unit_dir, eps);
  return std::abs(o_base - expectation(o, moved));
}

}  // namespace

double bisect_epsilon(const PureState& base, const Vector& unit_dir,
                      const Matrix& o, double delta0, double tol,
                      int max_iter) {
  if (delta0 < 0.0) {
    throw Error("delta0 must be nonnegative");
  }
  if (delta0 == 0.0) return 0.0;
  if (std::abs(unit_dir.norm() - 1.0) > 1e-9) {
    throw Error("perturbation direction must be unit-normalized");
  }

  const double o_base = expectation(o, base);

  // Doubling phase: the observable distance vanishes at eps = 0 and is
  // monotone for small eps, so doubling brackets the target quickly.
  double hi = delta0;
  double hi_delta = observable_distance(o, o_base, base, unit_dir, hi);
  double lo = 0.0;
  const int max_doublings = std::min(max_iter, 100);
  int doublings = 0;
  while (hi_delta < delta0) {
    if (++doublings > max_doublings) {
      throw DirectionDegenerateError(
          "observable insensitive to perturbation direction");
    }
    lo = hi;
    hi *= 2.0;
    hi_delta = observable_distance(o, o_base, base, unit_dir, hi);
  }

  if (std::abs(hi_delta - delta0) <= tol) return hi;
  for (int iter = 0; iter < max_iter; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double mid_delta = observable_distance(o, o_base, base, unit_dir, mid);
    if (std::abs(mid_delta - delta0) <= tol) return mid;
    if (mid_delta < delta0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw NumericError("bisection failed to reach tolerance");
}

PureState make_perturbed(const PureState& base, const Vector& unit_dir,
                         const Matrix& o, const LyapunovConfig& cfg) {
  const double tol = cfg.bisect_tol_rel * cfg.delta0;
  const double eps = bisect_epsilon(base, unit_dir, o, cfg.delta0, tol,
                                    cfg.bisect_max_iter);
  return apply_perturbation(base, unit_dir, eps);
}

namespace {

// Renormalization direction with fallback: current difference vector first
// (when requested), then fresh random draws while the bisection reports a
// degenerate direction.
PureState reset_perturbation(const PureState& base, const PureState& pert,
                             const Matrix& o, const LyapunovConfig& lcfg,
                             rng::Stream& dir_stream, int& consecutive_failures) {
  Vector dir;
  bool have_direction = false;
  if (lcfg.renorm_direction == RenormDirection::difference) {
    Vector diff = pert.amplitudes - base.amplitudes;
    const double norm = diff.norm();
    if (norm > 1e-300) {
      dir = diff / norm;
      have_direction = true;
    }
  }
  for (int attempt = 0; attempt < 12; ++attempt) {
    if (!have_direction) {
      dir = random_direction(base.dim(), dir_stream);
    }
    try {
      PureState next = make_perturbed(base, dir, o, lcfg);
      consecutive_failures = 0;
      return next;
    } catch (const DirectionDegenerateError&) {
      ++consecutive_failures;
      if (consecutive_failures > 10) throw;
      have_direction = false;
    }
  }
  throw DirectionDegenerateError("no usable perturbation direction found");
}

}  // namespace

namespace {

LyapunovEstimate estimate_le_impl(const LindbladModel& model, const Matrix& o,
                                  const TrajectoryConfig& tcfg,
                                  const LyapunovConfig& lcfg,
                                  const PairObserver* observer) {
  if (!(lcfg.delta0 > 0.0)) {
    throw Error("delta0 must be positive");
  }
  if (!(lcfg.tau >= 10.0 * tcfg.dt)) {
    throw Error("tau must be at least ten trajectory steps");
  }
  if (lcfg.n_renorms < 1) {
    throw Error("need at least one renormalization period");
  }

  const EffectiveHamiltonian heff = effective_hamiltonian(model);
  const Matrix propagator = matexp(Complex(0, -1) * heff.matrix, tcfg.dt);

  rng::Stream jump_stream(
      rng::derive(tcfg.seed, rng::Purpose::trajectory, {}));
  rng::Stream dir_stream(rng::derive(tcfg.seed, rng::Purpose::direction, {}));

  TrajectoryEngine base(model, propagator, tcfg.dt, neel_state(model.basis),
                        std::move(jump_stream));
  base.advance(tcfg.transient_time);

  int consecutive_failures = 0;
  Vector dir = random_direction(base.state().dim(), dir_stream);
  PureState perturbed_state = [&] {
    for (int attempt = 0;; ++attempt) {
      try {
        return make_perturbed(base.state(), dir, o, lcfg);
      } catch (const DirectionDegenerateError&) {
        if (++consecutive_failures > 10) throw;
        dir = random_direction(base.state().dim(), dir_stream);
      }
    }
  }();
  consecutive_failures = 0;

  TrajectoryEngine pert = base.fork(std::move(perturbed_state));

  LyapunovEstimate est;
  est.pair_seed = tcfg.seed;
  est.model_label = model.label;
  est.records.reserve(lcfg.n_renorms);

  const long long steps_per_tau = std::llround(lcfg.tau / tcfg.dt);
  if (std::abs(steps_per_tau * tcfg.dt - lcfg.tau) > 1e-9) {
    throw Error("tau must be an integral number of trajectory steps");
  }

  double log_sum = 0.0;
  for (int k = 1; k <= lcfg.n_renorms; ++k) {
    if (observer == nullptr) {
      base.advance(lcfg.tau);
      pert.advance(lcfg.tau);
    } else {
      for (long long s = 0; s < steps_per_tau; ++s) {
        base.step();
        pert.step();
        PairStepSample sample;
        sample.t = base.time();
        sample.base_obs = expectation(o, base.state());
        sample.delta =
            std::abs(sample.base_obs - expectation(o, pert.state()));
        sample.base_norm_sq = base.state().norm_sq;
        sample.jump_base = base.jumped_last_step();
        sample.jump_pert = pert.jumped_last_step();
        sample.renorm = false;
        (*observer)(sample);
      }
    }

    double delta = std::abs(expectation(o, base.state()) -
                            expectation(o, pert.state()));
    if (delta == 0.0) delta = std::numeric_limits<double>::min();
    const double d_k = delta / lcfg.delta0;
    const double log_dk = std::log(d_k);
    est.records.push_back(
        {k, static_cast<double>(k) * lcfg.tau, delta, d_k, log_dk});
    log_sum += log_dk;

    pert.replace_state(reset_perturbation(base.state(), pert.state(), o, lcfg,
                                          dir_stream, consecutive_failures));
    if (observer != nullptr) {
      PairStepSample sample;
      sample.t = base.time();
      sample.base_obs = expectation(o, base.state());
      sample.delta = std::abs(sample.base_obs - expectation(o, pert.state()));
      sample.base_norm_sq = base.state().norm_sq;
      sample.renorm = true;
      (*observer)(sample);
    }
  }

  est.lambda = log_sum / (static_cast<double>(lcfg.n_renorms) * lcfg.tau);
  return est;
}

}  // namespace

LyapunovEstimate estimate_le(const LindbladModel& model, const Matrix& o,
                             const TrajectoryConfig& tcfg,
                             const LyapunovConfig& lcfg) {
  return estimate_le_impl(model, o, tcfg, lcfg, nullptr);
}

LyapunovEstimate estimate_le(const LindbladModel& model, const Matrix& o,
                             const TrajectoryConfig& tcfg,
                             const LyapunovConfig& lcfg,
                             const PairObserver& observer) {
  return estimate_le_impl(model, o, tcfg, lcfg, &observer);
}

SweepResult le_sweep(const MblParams& params, const std::vector<double>& w_grid,
                     int n_disorder, int n_traj, const TrajectoryConfig& tcfg,
                     const LyapunovConfig& lcfg, ObservableKind observable,
                     std::uint64_t observable_seed, std::uint64_t master_seed,
                     int workers) {
  if (w_grid.empty() || n_disorder < 1 || n_traj < 1) {
    throw Error("sweep grids must be non-empty");
  }

  SweepResult result;
  result.cells.resize(w_grid.size() * n_disorder * n_traj);

  // One job per disorder realization; the model and step propagator are
  // built once and shared by that realization's trajectory pairs.
  const std::size_t n_jobs = w_grid.size() * static_cast<std::size_t>(n_disorder);
  parallel_for(n_jobs, workers, [&](std::size_t job) {
    const std::size_t wi = job / n_disorder;
    const std::size_t di = job % n_disorder;
    const double w = w_grid[wi];
    const std::uint64_t disorder_seed =
        rng::derive(master_seed, rng::Purpose::disorder, {wi, di});

    for (int t = 0; t < n_traj; ++t) {
      const std::size_t cell_index =
          (wi * n_disorder + di) * static_cast<std::size_t>(n_traj) + t;
      SweepCell& cell = result.cells[cell_index];
      cell.w = w;
      cell.disorder_seed = disorder_seed;
      cell.pair_seed = rng::derive(master_seed, rng::Purpose::trajectory,
                                   {wi, di, static_cast<std::uint64_t>(t)});
      try {
        const DisorderRealization disorder =
            sample_disorder(params.sites, disorder_seed);
        const LindbladModel model = build_mbl_chain(
            params.sites, w, params.j, params.u, params.gamma, disorder);
        const Matrix obs =
            observable == ObservableKind::model_hamiltonian
                ? model.hamiltonian
                : sample_goe_observable(model.dim(), observable_seed);
        TrajectoryConfig cell_tcfg = tcfg;
        cell_tcfg.seed = cell.pair_seed;
        cell.lambda = estimate_le(model, obs, cell_tcfg, lcfg).lambda;
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
      }
    }
  });

  for (std::size_t wi = 0; wi < w_grid.size(); ++wi) {
    SweepRow row;
    row.w = w_grid[wi];
    double sum = 0.0, sum_sq = 0.0;
    int n = 0;
    for (int di = 0; di < n_disorder; ++di) {
      for (int t = 0; t < n_traj; ++t) {
        const SweepCell& cell =
            result.cells[(wi * n_disorder + di) * n_traj + t];
        if (!cell.ok) continue;
        sum += cell.lambda;
        sum_sq += cell.lambda * cell.lambda;
        ++n;
      }
    }
    row.n_cells = n;
    if (n > 0) {
      row.mean_lambda = sum / n;
      if (n > 1) {
        const double var =
            std::max(0.0, (sum_sq - sum * sum / n) / (n - 1));
        row.stderr_lambda = std::sqrt(var / n);
      }
    }
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace dqc
