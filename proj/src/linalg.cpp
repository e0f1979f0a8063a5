#include "dqc/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace dqc {

bool is_hermitian(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return max_abs(a - a.adjoint()) <= tol;
}

double max_abs(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  const Index da = a.rows(), db = b.rows();
  if (a.cols() != da || b.cols() != db) {
    throw DimensionError("kron expects square operators");
  }
  if (da != 0 && db > kMaxKronDim / da) {
    throw DimensionError("kron result exceeds dense dimension budget");
  }
  Matrix out(da * db, da * db);
  for (Index i = 0; i < da; ++i) {
    for (Index j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = a(i, j) * b;
    }
  }
  return out;
}

Matrix matexp(const Matrix& a, double t) {
  if (a.rows() != a.cols()) {
    throw DimensionError("matexp expects a square operator");
  }
  if (a.rows() > kMaxDenseDim) {
    throw DimensionError("matexp operand exceeds dense dimension budget");
  }
  if (!a.allFinite() || !std::isfinite(t)) {
    throw NumericError("matexp operand has non-finite entries");
  }
  return (t * a).exp();
}

double expectation(const Matrix& o, const PureState& psi) {
  if (o.rows() != psi.dim() || o.cols() != psi.dim()) {
    throw DimensionError("observable/state dimension mismatch");
  }
  if (psi.norm_sq < 1e-300) {
    throw NumericError("expectation on a state with vanishing norm");
  }
  const Complex raw = psi.amplitudes.dot(o * psi.amplitudes);
  return raw.real() / psi.norm_sq;
}

double trace_distance(const Matrix& rho_a, const Matrix& rho_b) {
  if (rho_a.rows() != rho_b.rows() || rho_a.cols() != rho_b.cols()) {
    throw DimensionError("trace_distance dimension mismatch");
  }
  check_density_matrix(rho_a);
  check_density_matrix(rho_b);
  Eigen::JacobiSVD<Matrix> svd(rho_a - rho_b);
  return 0.5 * svd.singularValues().sum();
}

void check_density_matrix(const Matrix& rho, double tol) {
  if (rho.rows() != rho.cols()) {
    throw DimensionError("density matrix must be square");
  }
  if (std::abs(rho.trace() - Complex(1.0)) > tol) {
    throw NumericError("density matrix trace differs from one");
  }
  if (!is_hermitian(rho, tol)) {
    throw NumericError("density matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) {
    throw NumericError("density matrix is not positive semidefinite");
  }
}

}  // namespace dqc
