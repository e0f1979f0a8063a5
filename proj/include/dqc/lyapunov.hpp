#pragma once

#include "dqc/models.hpp"
#include "dqc/rng.hpp"
#include "dqc/types.hpp"
#include "dqc/unravel.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dqc {

enum class RenormDirection { difference, random };

struct LyapunovConfig {
  double delta0 = 1e-6;          // target observable distance
  double tau = 5.0;              // renormalization period
  int n_renorms = 100;           // K
  double bisect_tol_rel = 1e-3;  // tolerance as a fraction of delta0
  int bisect_max_iter = 200;
  RenormDirection renorm_direction = RenormDirection::difference;
};

struct GrowthRecord {
  int k = 0;
  double t_k = 0.0;
  double delta_tk = 0.0;
  double d_k = 0.0;
  double log_dk = 0.0;
};

struct LyapunovEstimate {
  double lambda = 0.0;
  std::vector<GrowthRecord> records;
  std::uint64_t pair_seed = 0;
  std::string model_label;
};

// Unit direction with amplitudes drawn uniformly from [-1, 1].
Vector random_direction(Index dim, rng::Stream& stream);

// psi_v = (base + eps * unit_dir), rescaled to carry exactly the norm of
// base.
PureState apply_perturbation(const PureState& base, const Vector& unit_dir,
                             double eps);

// Finds eps >= 0 with | |o_b - o_v(eps)| - delta0 | <= tol by doubling from
// delta0 until the target is bracketed, then bisecting. Throws
// DirectionDegenerateError when the direction cannot move the observable far
// enough (caller redraws the direction).
double bisect_epsilon(const PureState& base, const Vector& unit_dir,
                      const Matrix& o, double delta0, double tol,
                      int max_iter);

PureState make_perturbed(const PureState& base, const Vector& unit_dir,
                         const Matrix& o, const LyapunovConfig& cfg);

// Per-step view of a running trajectory pair, for trace dumps.
struct PairStepSample {
  double t = 0.0;
  double delta = 0.0;
  double base_norm_sq = 0.0;
  double base_obs = 0.0;
  bool jump_base = false;
  bool jump_pert = false;
  bool renorm = false;
};
using PairObserver = std::function<void(const PairStepSample&)>;

// Largest Lyapunov exponent from one base/perturbed trajectory pair with
// shared jump randomness. The transient comes from tcfg.transient_time and
// the pair identity from tcfg.seed. The traced overload reports every step
// after the transient; tracing costs two extra expectation values per step.
LyapunovEstimate estimate_le(const LindbladModel& model, const Matrix& o,
                             const TrajectoryConfig& tcfg,
                             const LyapunovConfig& lcfg);
LyapunovEstimate estimate_le(const LindbladModel& model, const Matrix& o,
                             const TrajectoryConfig& tcfg,
                             const LyapunovConfig& lcfg,
                             const PairObserver& observer);

enum class ObservableKind { model_hamiltonian, goe_random };

struct MblParams {
  int sites = 8;
  double j = 1.0;
  double u = 1.0;
  double gamma = 0.1;
};

struct SweepCell {
  double w = 0.0;
  std::uint64_t disorder_seed = 0;
  std::uint64_t pair_seed = 0;
  double lambda = 0.0;
  bool ok = false;
  std::string error;
};

struct SweepRow {
  double w = 0.0;
  double mean_lambda = 0.0;
  double stderr_lambda = 0.0;
  int n_cells = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepCell> cells;
};

// Disorder-averaged LE over a grid of disorder strengths. Failed cells are
// quarantined and reported; the sweep continues.
SweepResult le_sweep(const MblParams& params, const std::vector<double>& w_grid,
                     int n_disorder, int n_traj, const TrajectoryConfig& tcfg,
                     const LyapunovConfig& lcfg, ObservableKind observable,
                     std::uint64_t observable_seed, std::uint64_t master_seed,
                     int workers);

}  // namespace dqc
