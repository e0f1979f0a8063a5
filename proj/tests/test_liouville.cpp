#include "dqc/liouville.hpp"

#include "dqc/linalg.hpp"
#include "dqc/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace dqc;

namespace {

Matrix random_hermitian(Index n, std::uint64_t seed) {
  rng::Stream stream(seed);
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      m(i, j) = Complex(stream.normal(), stream.normal());
    }
  }
  return 0.5 * (m + m.adjoint());
}

Matrix random_density(Index n, std::uint64_t seed) {
  rng::Stream stream(seed);
  Matrix g(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      g(i, j) = Complex(stream.normal(), stream.normal());
    }
  }
  Matrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

LindbladModel amplitude_damping(double gamma) {
  LindbladModel model;
  model.basis = BasisDescriptor::spin_chain(1);
  model.hamiltonian = Matrix::Zero(2, 2);
  Matrix lower = Matrix::Zero(2, 2);
  lower(0, 1) = 1.0;  // |0><1|
  model.jumps.push_back({lower, gamma});
  model.label = "amplitude_damping";
  return model;
}

}  // namespace

TEST_CASE("vectorization follows column stacking") {
  const Matrix a = random_hermitian(3, 1);
  const Matrix b = random_hermitian(3, 2);
  const Matrix rho = random_density(3, 3);
  const Vector lhs = vectorize(a * rho * b);
  const Vector rhs = kron(b.transpose(), a) * vectorize(rho);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(max_abs(devectorize(vectorize(rho), 3) - rho) == 0.0);
}

TEST_CASE("amplitude damping superoperator acts correctly") {
  const LindbladModel model = amplitude_damping(1.0);
  const Superoperator s = build_superoperator(model);

  Matrix excited = Matrix::Zero(2, 2);
  excited(1, 1) = 1.0;
  const Matrix drho = devectorize(s.matrix * vectorize(excited), 2);

  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 1.0;
  expected(1, 1) = -1.0;
  CHECK(max_abs(drho - expected) < 1e-14);
}

TEST_CASE("superoperator matches the direct master-equation form") {
  const LindbladModel mbl =
      build_mbl_chain(4, 2.0, 1.0, 1.0, 0.1, sample_disorder(4, 17));
  const LindbladModel integrable = build_integrable_chain(3, 1, -1, 1.0);
  for (const LindbladModel* model : {&mbl, &integrable}) {
    const Superoperator s = build_superoperator(*model);
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
      const Matrix rho = random_density(model->dim(), 50 + trial);
      const Matrix via_superop =
          devectorize(s.matrix * vectorize(rho), model->dim());
      CHECK(max_abs(via_superop - lindblad_rhs(*model, rho)) <= 1e-10);
    }
  }
}

TEST_CASE("trace rows vanish for both models") {
  for (const LindbladModel& model :
       {build_integrable_chain(4, 1, -1, 1.0),
        build_mbl_chain(4, 2.0, 1.0, 1.0, 0.1, sample_disorder(4, 11))}) {
    const Superoperator s = build_superoperator(model);
    const Matrix id = Matrix::Identity(model.dim(), model.dim());
    const Vector row = s.matrix.adjoint() * vectorize(id);
    CHECK(row.cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("integrable spectrum is purely real with a stationary eigenvalue") {
  const Spectrum spec =
      spectrum(build_superoperator(build_integrable_chain(4, 1, -1, 1.0)));
  double max_imag = 0.0;
  double max_real = -1.0;
  double closest_to_zero = 1e300;
  for (const Complex& ev : spec.eigenvalues) {
    max_imag = std::max(max_imag, std::abs(ev.imag()));
    max_real = std::max(max_real, ev.real());
    closest_to_zero = std::min(closest_to_zero, std::abs(ev));
  }
  CHECK(max_imag <= 1e-8);
  CHECK(max_real <= 1e-8);
  CHECK(closest_to_zero <= 1e-8);
}

TEST_CASE("mbl spectrum is conjugation symmetric and dissipative") {
  const LindbladModel model =
      build_mbl_chain(4, 2.0, 1.0, 1.0, 0.1, sample_disorder(4, 23));
  const Spectrum spec = spectrum(build_superoperator(model));

  double max_real = -1.0;
  double closest_to_zero = 1e300;
  for (const Complex& ev : spec.eigenvalues) {
    max_real = std::max(max_real, ev.real());
    closest_to_zero = std::min(closest_to_zero, std::abs(ev));
  }
  CHECK(max_real <= 1e-8);
  CHECK(closest_to_zero <= 1e-8);

  // Conjugating the multiset must land on the multiset itself.
  double worst_pairing = 0.0;
  for (const Complex& ev : spec.eigenvalues) {
    double best = 1e300;
    for (const Complex& mu : spec.eigenvalues) {
      best = std::min(best, std::abs(std::conj(ev) - mu));
    }
    worst_pairing = std::max(worst_pairing, best);
  }
  CHECK(worst_pairing <= 1e-8);
}

TEST_CASE("integrable spectrum is invariant under chain reflection") {
  const int sites = 4;
  const LindbladModel model = build_integrable_chain(sites, 1, -1, 1.0);

  // Site-reversal permutation on the spin basis.
  const Index dim = model.dim();
  Matrix reversal = Matrix::Zero(dim, dim);
  for (Index idx = 0; idx < dim; ++idx) {
    Index reflected = 0;
    for (int l = 0; l < sites; ++l) {
      if ((idx >> l) & 1) reflected |= Index{1} << (sites - 1 - l);
    }
    reversal(reflected, idx) = 1.0;
  }

  LindbladModel mirrored = model;
  mirrored.hamiltonian = reversal * model.hamiltonian * reversal.adjoint();
  for (auto& jump : mirrored.jumps) {
    jump.op = reversal * jump.op * reversal.adjoint();
  }

  auto eigs = [](const LindbladModel& m) {
    std::vector<double> v;
    for (const Complex& ev : spectrum(build_superoperator(m)).eigenvalues) {
      v.push_back(ev.real());
    }
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto a = eigs(model);
  const auto b = eigs(mirrored);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(std::abs(a[k] - b[k]) <= 1e-8);
  }
}

TEST_CASE("density evolution trivial and closed-form cases") {
  const LindbladModel damping = amplitude_damping(1.0);
  Matrix excited = Matrix::Zero(2, 2);
  excited(1, 1) = 1.0;

  CHECK(max_abs(evolve_density(damping, excited, 0.0, 0.01) - excited) == 0.0);

  const Matrix at_one = evolve_density(damping, excited, 1.0, 0.01);
  CHECK(std::abs(at_one(1, 1).real() - std::exp(-1.0)) < 1e-6);
  CHECK(std::abs(at_one(0, 0).real() - (1.0 - std::exp(-1.0))) < 1e-6);
}

TEST_CASE("density evolution preserves trace on the integrable model") {
  const LindbladModel model = build_integrable_chain(3, 1, -1, 1.0);
  Matrix rho0 = Matrix::Zero(8, 8);
  rho0(0b101, 0b101) = 1.0;  // alternating product state
  const Matrix rho = evolve_density(model, rho0, 10.0, 0.01);
  CHECK(std::abs(rho.trace() - Complex(1.0)) <= 1e-10);
}

TEST_CASE("density evolution composes") {
  const LindbladModel model =
      build_mbl_chain(4, 1.0, 1.0, 1.0, 0.1, sample_disorder(4, 29));
  const Matrix rho0 = random_density(model.dim(), 31);
  const Matrix direct = evolve_density(model, rho0, 1.0, 0.01);
  const Matrix staged = evolve_density(
      model, evolve_density(model, rho0, 0.6, 0.01), 0.4, 0.01);
  CHECK(max_abs(direct - staged) <= 1e-9);
}

TEST_CASE("density evolution validates inputs") {
  const LindbladModel model = amplitude_damping(1.0);
  Matrix not_density = Matrix::Identity(2, 2);
  CHECK_THROWS_AS((void)evolve_density(model, not_density, 1.0, 0.01),
                  NumericError);
}

TEST_CASE("superoperator memory budget is enforced") {
  const LindbladModel model =
      build_mbl_chain(10, 1.0, 1.0, 1.0, 0.1, sample_disorder(10, 1));
  CHECK(model.dim() == 252);
  CHECK_THROWS_AS((void)build_superoperator(model), DimensionError);
}
