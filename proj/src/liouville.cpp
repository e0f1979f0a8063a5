#include "dqc/liouville.hpp"

#include "dqc/linalg.hpp"
#include "dqc/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace dqc {

Vector vectorize(const Matrix& rho) {
  return Eigen::Map<const Vector>(rho.data(), rho.size());
}

Matrix devectorize(const Vector& v, Index dim) {
  if (v.size() != dim * dim) {
    throw DimensionError("vector length is not dim^2");
  }
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Superoperator build_superoperator(const LindbladModel& model) {
  model.validate();
  const Index n = model.dim();
  if (n * n > kMaxEigenDim) {
    throw DimensionError("superoperator exceeds memory budget");
  }
  const Matrix id = Matrix::Identity(n, n);
  const Matrix& h = model.hamiltonian;

  Matrix s = Complex(0, -1) * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& jump : model.jumps) {
    const Matrix& l = jump.op;
    const Matrix ldl = l.adjoint() * l;
    s += jump.rate * (kron(l.conjugate(), l) - 0.5 * kron(id, ldl) -
                      0.5 * kron(ldl.transpose(), id));
  }

  Superoperator out;
  out.hilbert_dim = n;
  out.matrix = std::move(s);
  out.source_label = model.label;
  return out;
}

Matrix lindblad_rhs(const LindbladModel& model, const Matrix& rho) {
  const Complex i(0, 1);
  Matrix drho = -i * (model.hamiltonian * rho - rho * model.hamiltonian);
  for (const auto& jump : model.jumps) {
    const Matrix ldl = jump.op.adjoint() * jump.op;
    drho += jump.rate * (jump.op * rho * jump.op.adjoint() -
                         0.5 * (ldl * rho + rho * ldl));
  }
  return drho;
}

Spectrum spectrum(const Superoperator& superop) {
  const Matrix& m = superop.matrix;
  const Index n = m.rows();
  if (n > kMaxEigenDim) {
    throw DimensionError("superoperator exceeds dense eigensolver budget");
  }

  Spectrum out;
  out.source_label = superop.source_label;
  out.hilbert_dim = superop.hilbert_dim;
  out.eigenvalues.reserve(n);

  const double scale = std::max(1.0, max_abs(m));
  Matrix vectors;
  if (is_hermitian(m, 1e-12 * scale)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success) {
      throw NumericError("eigensolver failed on " + superop.source_label);
    }
    for (Index k = 0; k < n; ++k) out.eigenvalues.emplace_back(es.eigenvalues()(k), 0.0);
    vectors = es.eigenvectors();
  } else {
    Eigen::ComplexEigenSolver<Matrix> es(m, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success) {
      throw NumericError("eigensolver failed on " + superop.source_label);
    }
    for (Index k = 0; k < n; ++k) out.eigenvalues.push_back(es.eigenvalues()(k));
    vectors = es.eigenvectors();
  }

  // Residual spot check on a few eigenpairs.
  rng::Stream pick(rng::mix64(0xabcdef12u + static_cast<std::uint64_t>(n)));
  const double norm_bound = scale * static_cast<double>(n);
  for (int probe = 0; probe < 10; ++probe) {
    const Index k = static_cast<Index>(pick.next() % static_cast<std::uint64_t>(n));
    const Vector v = vectors.col(k);
    const double residual = (m * v - out.eigenvalues[static_cast<std::size_t>(k)] * v).norm();
    if (residual > 1e-8 * norm_bound) {
      throw NumericError("eigenpair residual too large on " + superop.source_label);
    }
  }
  return out;
}

Matrix evolve_density(const LindbladModel& model, const Matrix& rho0,
                      double t_final, double dt) {
  check_density_matrix(rho0);
  if (rho0.rows() != model.dim()) {
    throw DimensionError("initial density matrix dimension mismatch");
  }
  if (t_final < 0.0 || !(dt > 0.0)) {
    throw Error("evolve_density needs t_final >= 0 and dt > 0");
  }
  if (t_final == 0.0) return rho0;

  const Superoperator superop = build_superoperator(model);
  const long long steps = std::llround(t_final / dt);
  const double step = t_final / static_cast<double>(steps);
  const Matrix propagator = matexp(superop.matrix, step);

  Vector v = vectorize(rho0);
  for (long long k = 0; k < steps; ++k) v = propagator * v;

  Matrix rho = devectorize(v, model.dim());
  if (std::abs(rho.trace() - Complex(1.0)) > 1e-8) {
    throw NumericError("trace drifted during density evolution");
  }
  if (max_abs(rho - rho.adjoint()) > 1e-8) {
    throw NumericError("hermiticity drifted during density evolution");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()),
                                           Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-6) {
    throw NumericError("density evolution drifted away from positivity");
  }
  return rho;
}

}  // namespace dqc
