#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace dqc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Largest operator dimension handled densely (model dims stay well below).
inline constexpr Index kMaxDenseDim = 4096;
// Largest superoperator side we hand to the dense eigensolver.
inline constexpr Index kMaxEigenDim = 5000;
// Hard cap on Kronecker-product results (superoperators included).
inline constexpr Index kMaxKronDim = 8192;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// All jump amplitudes vanished while a jump was due.
class DarkStateError : public Error {
 public:
  using Error::Error;
};

// Perturbation direction cannot move the observable; caller redraws.
class DirectionDegenerateError : public Error {
 public:
  using Error::Error;
};

class DegenerateSpectrumError : public Error {
 public:
  using Error::Error;
};

// Normalized pure state of a finite-dimensional system. The squared norm is
// cached because trajectory evolution is non-unitary and the decay of the
// norm carries the jump-timing information.
struct PureState {
  Vector amplitudes;
  double norm_sq = 0.0;

  PureState() = default;

  explicit PureState(Vector amps)
      : amplitudes(std::move(amps)), norm_sq(amplitudes.squaredNorm()) {}

  Index dim() const { return amplitudes.size(); }

  double norm() const { return std::sqrt(norm_sq); }

  void refresh_norm() { norm_sq = amplitudes.squaredNorm(); }

  // Rescales to unit norm; throws if the state has decayed to nothing.
  void normalize() {
    if (norm_sq < 1e-300) {
      throw NumericError("cannot normalize state with vanishing norm");
    }
    amplitudes /= std::sqrt(norm_sq);
    norm_sq = 1.0;
  }

  PureState normalized() const {
    PureState out = *this;
    out.normalize();
    return out;
  }

  // Basis state |i>.
  static PureState basis_state(Index dim, Index i) {
    Vector v = Vector::Zero(dim);
    v(i) = 1.0;
    return PureState(std::move(v));
  }
};

}  // namespace dqc
