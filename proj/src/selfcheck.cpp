#include "dqc/selfcheck.hpp"

#include "dqc/csr.hpp"
#include "dqc/experiment.hpp"
#include "dqc/io.hpp"
#include "dqc/linalg.hpp"
#include "dqc/liouville.hpp"
#include "dqc/lyapunov.hpp"
#include "dqc/models.hpp"
#include "dqc/unravel.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

namespace dqc::selfcheck {

namespace {

namespace fs = std::filesystem;

// Complex points on a dyadic grid: affine maps with power-of-two scale and
// grid-aligned shift are exact in floating point, so the ratio lists must
// match bit for bit.
std::vector<Complex> dyadic_points(std::size_t n, std::uint64_t seed) {
  rng::Stream stream(seed);
  std::vector<Complex> points;
  points.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double re = static_cast<double>(static_cast<int>(stream.next() % 2049) - 1024) / 1024.0;
    const double im = static_cast<double>(static_cast<int>(stream.next() % 2049) - 1024) / 1024.0;
    points.emplace_back(re, im);
  }
  return points;
}

CheckResult check_affine_invariance() {
  CheckResult res{"csr affine invariance (exact)", true, ""};
  const std::vector<Complex> base = dyadic_points(300, 0x5eedu);
  const auto reference = csr_values(base);

  const Complex scales[] = {{2.0, 0.0}, {0.25, 0.0}, {-4.0, 0.0}};
  const Complex shift(0.25, -0.5);
  for (const Complex& a : scales) {
    std::vector<Complex> mapped(base.size());
    for (std::size_t k = 0; k < base.size(); ++k) {
      mapped[k] = a * base[k] + shift;
    }
    const auto transformed = csr_values(mapped);
    for (std::size_t k = 0; k < reference.size(); ++k) {
      if (reference[k].degenerate != transformed[k].degenerate ||
          reference[k].z.real() != transformed[k].z.real() ||
          reference[k].z.imag() != transformed[k].z.imag()) {
        res.pass = false;
        res.detail = "mismatch at sample " + std::to_string(k);
        return res;
      }
    }
  }
  return res;
}

CheckResult check_unit_disc() {
  CheckResult res{"csr samples confined to unit disc", true, ""};
  const Spectrum spec = sample_ginue(200, 7);
  double worst = 0.0;
  for (const auto& s : csr_values(spec)) {
    if (!s.degenerate) worst = std::max(worst, std::abs(s.z));
  }
  res.pass = worst <= 1.0 + 1e-12;
  res.detail = "max |z| = " + io::format_double(worst);
  return res;
}

CheckResult check_neighbor_equality() {
  CheckResult res{"neighbor search equals quadratic scan", true, ""};
  rng::Stream stream(0xfeedu);
  std::vector<Complex> points;
  for (int k = 0; k < 1000; ++k) {
    points.emplace_back(stream.uniform(-1.0, 1.0), stream.uniform(-1.0, 1.0));
  }
  // A few exact duplicates exercise the distance-zero tie path.
  points[100] = points[7];
  points[500] = points[7];
  const auto fast = neighbor_triples(points);
  const auto brute = neighbor_triples_brute(points);
  for (std::size_t k = 0; k < fast.size(); ++k) {
    if (fast[k].nn != brute[k].nn || fast[k].nnn != brute[k].nnn) {
      res.pass = false;
      res.detail = "mismatch at point " + std::to_string(k);
      return res;
    }
  }
  return res;
}

CheckResult check_trace_rows() {
  CheckResult res{"superoperator trace rows vanish", true, ""};
  const LindbladModel integrable = build_integrable_chain(4, 1, -1, 1.0);
  const LindbladModel mbl =
      build_mbl_chain(4, 2.0, 1.0, 1.0, 0.1, sample_disorder(4, 11));
  double worst = 0.0;
  for (const LindbladModel* model : {&integrable, &mbl}) {
    const Superoperator s = build_superoperator(*model);
    const Index n = model->dim();
    Matrix id = Matrix::Identity(n, n);
    const Vector trace_row = s.matrix.adjoint() * vectorize(id);
    worst = std::max(worst, trace_row.cwiseAbs().maxCoeff());
  }
  res.pass = worst <= 1e-10;
  res.detail = "max |vec(I)^dag L| = " + io::format_double(worst);
  return res;
}

CheckResult check_norm_monotonicity() {
  CheckResult res{"norm non-increasing between jumps", true, ""};
  const LindbladModel model =
      build_mbl_chain(4, 1.0, 1.0, 1.0, 0.1, sample_disorder(4, 3));
  const EffectiveHamiltonian heff = effective_hamiltonian(model);
  const double dt = 1e-2;
  const Matrix propagator = matexp(Complex(0, -1) * heff.matrix, dt);
  TrajectoryEngine engine(model, propagator, dt, neel_state(model.basis),
                          rng::Stream(21));
  double previous = engine.state().norm_sq;
  for (int step = 0; step < 5000; ++step) {
    engine.step();
    const double now = engine.state().norm_sq;
    if (!engine.jumped_last_step() && now > previous + 1e-12) {
      res.pass = false;
      res.detail = "norm grew at step " + std::to_string(step);
      return res;
    }
    previous = now;
  }
  res.detail = std::to_string(engine.jumps().size()) + " jumps observed";
  return res;
}

CheckResult check_bisection_replay() {
  CheckResult res{"bisection postcondition replay", true, ""};
  const LindbladModel model =
      build_mbl_chain(4, 2.0, 1.0, 1.0, 0.1, sample_disorder(4, 5));
  const Matrix o = model.hamiltonian;
  rng::Stream stream(31);

  // A mildly evolved, slightly decayed base state.
  const EffectiveHamiltonian heff = effective_hamiltonian(model);
  const Matrix propagator = matexp(Complex(0, -1) * heff.matrix, 1e-2);
  TrajectoryEngine engine(model, propagator, 1e-2, neel_state(model.basis),
                          rng::Stream(77));
  engine.advance(2.0);
  const PureState base = engine.state();

  const double delta0 = 1e-6;
  const double tol = 1e-3 * delta0;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Vector dir = random_direction(base.dim(), stream);
    double eps;
    try {
      eps = bisect_epsilon(base, dir, o, delta0, tol, 200);
    } catch (const DirectionDegenerateError&) {
      continue;
    }
    const PureState moved = apply_perturbation(base, dir, eps);
    const double delta =
        std::abs(expectation(o, base) - expectation(o, moved));
    worst = std::max(worst, std::abs(delta - delta0));
  }
  res.pass = worst <= tol;
  res.detail = "worst |delta - delta0| = " + io::format_double(worst);
  return res;
}

CheckResult check_determinism(int workers) {
  CheckResult res{"end-to-end determinism (byte equality)", true, ""};
  const std::string config_text = R"({
    "schema_version": 1,
    "experiment": "le_sweep",
    "model": {"kind": "mbl", "sites": 4, "w_grid": [2.0]},
    "trajectory": {"dt": 0.01, "transient_time": 5.0},
    "lyapunov": {"tau": 1.0, "n_renorms": 5},
    "sampling": {"n_disorder": 2, "n_traj": 2, "master_seed": 424242},
    "output": {"directory": "SELFCHECK_OUT"}
  })";

  const fs::path tmp =
      fs::temp_directory_path() /
      ("dqc_selfcheck_" + std::to_string(rng::mix64(
                              std::chrono::steady_clock::now()
                                  .time_since_epoch()
                                  .count())));
  const fs::path run_a = tmp / "a";
  const fs::path run_b = tmp / "b";

  auto run_once = [&](const fs::path& dir) {
    std::string text = config_text;
    const std::string marker = "SELFCHECK_OUT";
    text.replace(text.find(marker), marker.size(), dir.string());
    const ExperimentConfig cfg = parse_config(text);
    run_experiment(cfg, workers);
  };

  try {
    run_once(run_a);
    run_once(run_b);
    for (const char* name : {"sweep.csv", "cells.csv"}) {
      const std::string a = io::read_text_file(run_a / name);
      const std::string b = io::read_text_file(run_b / name);
      if (a != b) {
        res.pass = false;
        res.detail = std::string(name) + " differs between identical runs";
        break;
      }
    }
  } catch (const std::exception& e) {
    res.pass = false;
    res.detail = e.what();
  }
  std::error_code ec;
  fs::remove_all(tmp, ec);
  return res;
}

}  // namespace

std::vector<CheckResult> run_all(int workers) {
  std::vector<CheckResult> results;
  results.push_back(check_affine_invariance());
  results.push_back(check_unit_disc());
  results.push_back(check_neighbor_equality());
  results.push_back(check_trace_rows());
  results.push_back(check_norm_monotonicity());
  results.push_back(check_bisection_replay());
  results.push_back(check_determinism(workers));
  return results;
}

bool run_and_report(std::ostream& out, int workers) {
  bool all_pass = true;
  for (const auto& res : run_all(workers)) {
    out << (res.pass ? "[PASS] " : "[FAIL] ") << res.name;
    if (!res.detail.empty()) out << " (" << res.detail << ")";
    out << "\n";
    all_pass = all_pass && res.pass;
  }
  return all_pass;
}

}  // namespace dqc::selfcheck
