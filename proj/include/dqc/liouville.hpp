#pragma once

#include "dqc/models.hpp"
#include "dqc/types.hpp"

#include <string>
#include <vector>

namespace dqc {

// Column-stacking vectorization throughout: vec(A rho B) = (B^T (x) A) vec(rho).
Vector vectorize(const Matrix& rho);
Matrix devectorize(const Vector& v, Index dim);

struct Superoperator {
  Index hilbert_dim = 0;
  Matrix matrix;  // hilbert_dim^2 x hilbert_dim^2
  std::string source_label;
};

struct Spectrum {
  std::vector<Complex> eigenvalues;
  std::string source_label;
  Index hilbert_dim = 0;
};

Superoperator build_superoperator(const LindbladModel& model);

// Full dense eigendecomposition; Hermitian superoperators take the
// symmetric solver.
Spectrum spectrum(const Superoperator& superop);

// Repeated application of exp(L*dt); the generator is time-independent.
Matrix evolve_density(const LindbladModel& model, const Matrix& rho0,
                      double t_final, double dt);

// Direct evaluation of the master-equation right-hand side; test oracle for
// the vectorized form.
Matrix lindblad_rhs(const LindbladModel& model, const Matrix& rho);

}  // namespace dqc
