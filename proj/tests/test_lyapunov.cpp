#include "dqc/lyapunov.hpp"

#include "dqc/linalg.hpp"

#include <doctest.h>

#include <cmath>

using namespace dqc;

namespace {

Matrix pauli_z() {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = 1.0;
  s(1, 1) = -1.0;
  return s;
}

PureState plus_state() {
  Vector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return PureState(std::move(v));
}

Vector minus_direction() {
  Vector v(2);
  v << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  return v;
}

}  // namespace

TEST_CASE("bisection solves the linear qubit case quickly") {
  // Base (|0>+|1>)/sqrt(2), direction (|0>-|1>)/sqrt(2), O = sigma_z:
  // Delta(eps) = 2 eps / (1 + eps^2), so eps* ~ delta0 / 2.
  const double delta0 = 1e-6;
  const double tol = 1e-3 * delta0;
  const double eps =
      bisect_epsilon(plus_state(), minus_direction(), pauli_z(), delta0, tol, 60);
  CHECK(eps == doctest::Approx(delta0 / 2.0).epsilon(1e-2));

  const PureState moved = apply_perturbation(plus_state(), minus_direction(), eps);
  const double delta = std::abs(expectation(pauli_z(), plus_state()) -
                                expectation(pauli_z(), moved));
  CHECK(std::abs(delta - delta0) <= tol);
}

TEST_CASE("bisection handles the zero target") {
  CHECK(bisect_epsilon(plus_state(), minus_direction(), pauli_z(), 0.0, 1e-9,
                       200) == 0.0);
}

TEST_CASE("bisection reports observable-blind directions") {
  // The identity observable cannot distinguish any two states.
  CHECK_THROWS_AS((void)bisect_epsilon(plus_state(), minus_direction(),
                                       Matrix::Identity(2, 2), 1e-6, 1e-9, 200),
                  DirectionDegenerateError);
}

TEST_CASE("perturbed states carry the base norm") {
  Vector v(3);
  v << 0.4, Complex(0.1, 0.2), Complex(0.0, -0.3);
  const PureState base(std::move(v));
  rng::Stream stream(17);
  const Vector dir = random_direction(3, stream);
  const PureState moved = apply_perturbation(base, dir, 1e-4);
  CHECK(std::abs(moved.norm() - base.norm()) <= 1e-12 * base.norm());
}

TEST_CASE("random directions are reproducible per stream seed") {
  rng::Stream a(33), b(33);
  const Vector da = random_direction(8, a);
  const Vector db = random_direction(8, b);
  CHECK(max_abs(da - db) == 0.0);
  CHECK(std::abs(da.norm() - 1.0) <= 1e-12);
}

TEST_CASE("growth records satisfy the accounting identity") {
  const LindbladModel model =
      build_mbl_chain(4, 2.0, 1.0, 1.0, 0.1, sample_disorder(4, 51));
  TrajectoryConfig tcfg;
  tcfg.dt = 1e-2;
  tcfg.transient_time = 5.0;
  tcfg.seed = 7;
  LyapunovConfig lcfg;
  lcfg.tau = 1.0;
  lcfg.n_renorms = 20;

  const LyapunovEstimate est =
      estimate_le(model, model.hamiltonian, tcfg, lcfg);
  REQUIRE(est.records.size() == 20);
  double log_sum = 0.0;
  for (const auto& rec : est.records) {
    CHECK(rec.d_k > 0.0);
    CHECK(rec.log_dk == doctest::Approx(std::log(rec.d_k)).epsilon(1e-12));
    log_sum += rec.log_dk;
  }
  CHECK(est.lambda ==
        doctest::Approx(log_sum / (20.0 * lcfg.tau)).epsilon(1e-12));
}

TEST_CASE("renormalization restores the target distance every period") {
  const LindbladModel model =
      build_mbl_chain(4, 1.0, 1.0, 1.0, 0.1, sample_disorder(4, 52));
  TrajectoryConfig tcfg;
  tcfg.dt = 1e-2;
  tcfg.transient_time = 2.0;
  tcfg.seed = 11;
  LyapunovConfig lcfg;
  lcfg.tau = 1.0;
  lcfg.n_renorms = 10;

  const double tol = lcfg.bisect_tol_rel * lcfg.delta0;
  int renorms_seen = 0;
  const PairObserver observer = [&](const PairStepSample& s) {
    if (s.renorm) {
      ++renorms_seen;
      CHECK(std::abs(s.delta - lcfg.delta0) <= tol);
    }
  };
  (void)estimate_le(model, model.hamiltonian, tcfg, lcfg, observer);
  CHECK(renorms_seen == 10);
}

TEST_CASE("shared noise keeps jumps synchronized on the integrable chain") {
  const LindbladModel model = build_integrable_chain(4, 1, -1, 1.0);
  const Matrix o = sample_goe_observable(model.dim(), 5);
  TrajectoryConfig tcfg;
  tcfg.dt = 1e-2;
  tcfg.transient_time = 10.0;
  tcfg.seed = 19;
  LyapunovConfig lcfg;
  lcfg.delta0 = 1e-10;
  lcfg.tau = 5.0;
  lcfg.n_renorms = 20;

  long long jumps = 0, mismatches = 0;
  const PairObserver observer = [&](const PairStepSample& s) {
    if (s.renorm) return;
    if (s.jump_base || s.jump_pert) ++jumps;
    if (s.jump_base != s.jump_pert) ++mismatches;
  };
  (void)estimate_le(model, o, tcfg, lcfg, observer);
  REQUIRE(jumps > 100);
  CHECK(static_cast<double>(mismatches) <= 0.01 * static_cast<double>(jumps));
}

TEST_CASE("integrable-model exponents center on zero") {
  const LindbladModel model = build_integrable_chain(4, 1, -1, 1.0);
  TrajectoryConfig tcfg;
  tcfg.dt = 1e-2;
  tcfg.transient_time = 20.0;
  LyapunovConfig lcfg;
  lcfg.tau = 5.0;
  lcfg.n_renorms = 50;

  const int n_pairs = 40;
  std::vector<double> lambdas;
  for (int p = 0; p < n_pairs; ++p) {
    const Matrix o = sample_goe_observable(
        model.dim(), rng::derive(400, {static_cast<std::uint64_t>(p)}));
    tcfg.seed = rng::derive(500, {static_cast<std::uint64_t>(p)});
    lambdas.push_back(estimate_le(model, o, tcfg, lcfg).lambda);
  }
  double mean = 0.0;
  for (double l : lambdas) mean += l;
  mean /= n_pairs;
  double var = 0.0;
  for (double l : lambdas) var += (l - mean) * (l - mean);
  var /= (n_pairs - 1);
  const double stderr_mean = std::sqrt(var / n_pairs);
  CHECK(std::abs(mean) <= 3.0 * stderr_mean);
}

TEST_CASE("tiny sweep equals a direct estimate with the same seeds") {
  MblParams params;
  params.sites = 4;
  TrajectoryConfig tcfg;
  tcfg.dt = 1e-2;
  tcfg.transient_time = 5.0;
  LyapunovConfig lcfg;
  lcfg.tau = 1.0;
  lcfg.n_renorms = 10;

  const std::uint64_t master = 909;
  const SweepResult sweep = le_sweep(params, {2.0}, 1, 1, tcfg, lcfg,
                                     ObservableKind::model_hamiltonian, 0,
                                     master, 1);
  REQUIRE(sweep.rows.size() == 1);
  REQUIRE(sweep.cells.size() == 1);
  CHECK(sweep.cells[0].ok);
  CHECK(sweep.rows[0].n_cells == 1);

  const std::uint64_t disorder_seed =
      rng::derive(master, rng::Purpose::disorder, {0, 0});
  const LindbladModel model = build_mbl_chain(
      params.sites, 2.0, params.j, params.u, params.gamma,
      sample_disorder(params.sites, disorder_seed));
  TrajectoryConfig cell_tcfg = tcfg;
  cell_tcfg.seed = rng::derive(master, rng::Purpose::trajectory, {0, 0, 0});
  const LyapunovEstimate direct =
      estimate_le(model, model.hamiltonian, cell_tcfg, lcfg);
  CHECK(sweep.cells[0].lambda == direct.lambda);
  CHECK(sweep.rows[0].mean_lambda == direct.lambda);
}

TEST_CASE("sweep quarantines failing cells and continues") {
  MblParams params;
  params.sites = 4;
  TrajectoryConfig tcfg;
  tcfg.dt = 1e-2;
  LyapunovConfig lcfg;
  lcfg.tau = 0.0333;  // not an integral number of steps: every cell fails
  lcfg.n_renorms = 5;

  const SweepResult sweep =
      le_sweep(params, {1.0, 2.0}, 1, 2, tcfg, lcfg,
               ObservableKind::model_hamiltonian, 0, 11, 1);
  REQUIRE(sweep.rows.size() == 2);
  for (const auto& row : sweep.rows) CHECK(row.n_cells == 0);
  for (const auto& cell : sweep.cells) {
    CHECK_FALSE(cell.ok);
    CHECK_FALSE(cell.error.empty());
  }
}
