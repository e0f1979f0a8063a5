#pragma once

#include "dqc/models.hpp"
#include "dqc/rng.hpp"
#include "dqc/types.hpp"

#include <string>
#include <vector>

namespace dqc {

struct EffectiveHamiltonian {
  Matrix matrix;  // H - (i/2) sum_k gamma_k L_k^dag L_k
  std::string model_label;
};

EffectiveHamiltonian effective_hamiltonian(const LindbladModel& model);

struct TrajectoryConfig {
  double dt = 1e-2;
  double transient_time = 0.0;
  double run_time = 0.0;
  std::uint64_t seed = 0;
};

struct JumpEvent {
  double time = 0.0;
  int operator_index = -1;  // -1 marks a dark-state encounter
  double pre_norm_sq = 0.0;
  double threshold = 0.0;
};

// Jump-operator selection: p_k proportional to gamma_k |L_k psi|^2. Returns
// the renormalized post-jump state and the chosen index.
std::pair<PureState, int> perform_jump(const PureState& psi,
                                       const LindbladModel& model,
                                       rng::Stream& stream);

// Piecewise-deterministic evolution driven by a precomputed step propagator
// exp(-i H_eff dt). The state decays between jumps; when its squared norm
// reaches the current uniform threshold, a jump fires at step resolution.
//
// The engine holds references to the model and propagator; both must outlive
// it. Copying an engine duplicates the RNG stream and threshold, which is
// exactly what shared-noise trajectory pairs need.
class TrajectoryEngine {
 public:
  TrajectoryEngine(const LindbladModel& model, const Matrix& step_propagator,
                   double dt, PureState psi, rng::Stream stream);

  void step();
  void advance(double duration);

  // Same randomness, same threshold, fresh jump log, replaced state.
  TrajectoryEngine fork(PureState psi) const;

  const PureState& state() const { return psi_; }
  PureState normalized_state() const { return psi_.normalized(); }
  void replace_state(PureState psi);
  double time() const { return t_; }
  double dt() const { return dt_; }
  const std::vector<JumpEvent>& jumps() const { return jumps_; }
  bool jumped_last_step() const { return jumped_last_step_; }
  long long dark_steps() const { return dark_steps_; }

 private:
  const LindbladModel* model_;
  const Matrix* propagator_;
  double dt_;
  double t_ = 0.0;
  PureState psi_;
  Vector scratch_;
  double threshold_;
  rng::Stream stream_;
  std::vector<JumpEvent> jumps_;
  bool jumped_last_step_ = false;
  long long dark_steps_ = 0;
};

// Convenience wrapper: evolves psi0 for transient_time + run_time and
// returns the final (unnormalized) state with the jump log.
std::pair<PureState, std::vector<JumpEvent>> evolve_trajectory(
    const PureState& psi0, const EffectiveHamiltonian& heff,
    const LindbladModel& model, const TrajectoryConfig& cfg,
    rng::Stream stream);

// (1/n) sum |psi_i><psi_i| over unit-normalized snapshots.
Matrix ensemble_average(const std::vector<PureState>& snapshots);

}  // namespace dqc
