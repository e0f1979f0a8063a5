#include "dqc/unravel.hpp"

#include "dqc/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <utility>

namespace dqc {

EffectiveHamiltonian effective_hamiltonian(const LindbladModel& model) {
  model.validate();
  Matrix heff = model.hamiltonian;
  for (const auto& jump : model.jumps) {
    heff -= Complex(0, 0.5) * jump.rate * (jump.op.adjoint() * jump.op);
  }

  // The anti-Hermitian part is -(1/2) sum gamma L^dag L; its spectrum must
  // not cross zero or the norm could grow between jumps.
  const Matrix decay = (heff - heff.adjoint()) / Complex(0, 2);
  Eigen::SelfAdjointEigenSolver<Matrix> es(decay, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().size() > 0 && es.eigenvalues().maxCoeff() > 1e-10) {
    throw NumericError("effective Hamiltonian decay part is not NSD");
  }
  return {std::move(heff), model.label};
}

std::pair<PureState, int> perform_jump(const PureState& psi,
                                       const LindbladModel& model,
                                       rng::Stream& stream) {
  const std::size_t n_ops = model.jumps.size();
  if (n_ops == 0) {
    throw DarkStateError("no jump operators");
  }
  std::vector<Vector> jumped(n_ops);
  std::vector<double> cumulative(n_ops);
  double total = 0.0;
  for (std::size_t k = 0; k < n_ops; ++k) {
    jumped[k] = model.jumps[k].op * psi.amplitudes;
    total += model.jumps[k].rate * jumped[k].squaredNorm();
    cumulative[k] = total;
  }
  if (!(total > 0.0)) {
    throw DarkStateError("all jump amplitudes vanish");
  }

  const double draw = stream.uniform01() * total;
  std::size_t pick = n_ops - 1;
  for (std::size_t k = 0; k < n_ops; ++k) {
    if (cumulative[k] > draw) {
      pick = k;
      break;
    }
  }

  PureState out(std::move(jumped[pick]));
  out.normalize();
  return {std::move(out), static_cast<int>(pick)};
}

TrajectoryEngine::TrajectoryEngine(const LindbladModel& model,
                                   const Matrix& step_propagator, double dt,
                                   PureState psi, rng::Stream stream)
    : model_(&model),
      propagator_(&step_propagator),
      dt_(dt),
      psi_(std::move(psi)),
      scratch_(psi_.dim()),
      stream_(std::move(stream)) {
  if (!(dt_ > 0.0)) {
    throw Error("trajectory step must be positive");
  }
  if (step_propagator.rows() != psi_.dim()) {
    throw DimensionError("propagator/state dimension mismatch");
  }
  threshold_ = stream_.uniform_open01();
}

void TrajectoryEngine::step() {
  const double previous_norm_sq = psi_.norm_sq;
  scratch_.noalias() = (*propagator_) * psi_.amplitudes;
  psi_.amplitudes.swap(scratch_);
  psi_.refresh_norm();
  t_ += dt_;
  jumped_last_step_ = false;

  if (model_->jumps.empty()) return;
  if (psi_.norm_sq > previous_norm_sq + 1e-12) {
    throw NumericError("norm grew between jumps");
  }

  if (psi_.norm_sq <= threshold_) {
    const double pre_norm_sq = psi_.norm_sq;
    try {
      auto [next, index] = perform_jump(psi_, *model_, stream_);
      psi_ = std::move(next);
      jumps_.push_back({t_, index, pre_norm_sq, threshold_});
      threshold_ = stream_.uniform_open01();
      jumped_last_step_ = true;
    } catch (const DarkStateError&) {
      if (dark_steps_ == 0) {
        jumps_.push_back({t_, -1, pre_norm_sq, threshold_});
      }
      ++dark_steps_;
    }
  }
}

void TrajectoryEngine::advance(double duration) {
  const long long steps = std::llround(duration / dt_);
  if (std::abs(steps * dt_ - duration) > 1e-9 * std::max(1.0, duration)) {
    throw Error("duration must be an integral number of steps");
  }
  for (long long k = 0; k < steps; ++k) step();
}

TrajectoryEngine TrajectoryEngine::fork(PureState psi) const {
  TrajectoryEngine twin(*model_, *propagator_, dt_, std::move(psi), stream_);
  // The constructor consumed one draw from its stream copy; restore exact
  // lockstep with this engine.
  twin.stream_ = stream_;
  twin.threshold_ = threshold_;
  twin.t_ = t_;
  twin.jumps_.clear();
  return twin;
}

void TrajectoryEngine::replace_state(PureState psi) {
  if (psi.dim() != psi_.dim()) {
    throw DimensionError("replacement state dimension mismatch");
  }
  psi_ = std::move(psi);
}

std::pair<PureState, std::vector<JumpEvent>> evolve_trajectory(
    const PureState& psi0, const EffectiveHamiltonian& heff,
    const LindbladModel& model, const TrajectoryConfig& cfg,
    rng::Stream stream) {
  if (std::abs(psi0.norm_sq - 1.0) > 1e-9) {
    throw NumericError("trajectory initial state must be unit-normalized");
  }
  const Matrix propagator = matexp(Complex(0, -1) * heff.matrix, cfg.dt);
  TrajectoryEngine engine(model, propagator, cfg.dt, psi0, std::move(stream));
  engine.advance(cfg.transient_time + cfg.run_time);
  return {engine.state(), engine.jumps()};
}

Matrix ensemble_average(const std::vector<PureState>& snapshots) {
  if (snapshots.empty()) {
    throw Error("ensemble average of an empty ensemble");
  }
  const Index dim = snapshots.front().dim();
  Matrix rho = Matrix::Zero(dim, dim);
  for (const auto& psi : snapshots) {
    if (psi.dim() != dim) {
      throw DimensionError("ensemble snapshot dimension mismatch");
    }
    if (std::abs(psi.norm_sq - 1.0) > 1e-9) {
      throw NumericError("ensemble snapshots must be unit-normalized");
    }
    rho.noalias() += psi.amplitudes * psi.amplitudes.adjoint();
  }
  return rho / static_cast<double>(snapshots.size());
}

}  // namespace dqc
