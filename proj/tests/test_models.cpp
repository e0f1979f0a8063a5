#include "dqc/models.hpp"

#include "dqc/linalg.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace dqc;

TEST_CASE("two-site integrable chain reproduces the pair block exactly") {
  const LindbladModel model = build_integrable_chain(2, 1, -1, 0.7);
  REQUIRE(model.jumps.size() == 1);
  CHECK(model.jumps[0].rate == 0.7);
  CHECK(max_abs(model.hamiltonian) == 0.0);

  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = 1.0;
  expected(1, 2) = 1.0;
  expected(2, 1) = 1.0;
  expected(3, 3) = -1.0;
  CHECK(max_abs(model.jumps[0].op - expected) == 0.0);
}

TEST_CASE("integrable jump operators are orthogonal") {
  const LindbladModel model = build_integrable_chain(4, 1, -1, 1.0);
  const Index dim = model.dim();
  Matrix sum = Matrix::Zero(dim, dim);
  for (const auto& jump : model.jumps) {
    const Matrix ldl = jump.op.adjoint() * jump.op;
    CHECK(max_abs(ldl - Matrix::Identity(dim, dim)) == 0.0);
    sum += ldl;
  }
  CHECK(max_abs(sum - 3.0 * Matrix::Identity(dim, dim)) == 0.0);
}

TEST_CASE("integrable chain validates eta and kappa") {
  CHECK_THROWS_AS((void)build_integrable_chain(3, 2, -1, 1.0), Error);
  CHECK_THROWS_AS((void)build_integrable_chain(3, 1, 0, 1.0), Error);
  CHECK_THROWS_AS((void)build_integrable_chain(3, 1, -1, 0.0), Error);
}

TEST_CASE("disorder is deterministic and bounded") {
  const DisorderRealization a = sample_disorder(12, 99);
  const DisorderRealization b = sample_disorder(12, 99);
  const DisorderRealization c = sample_disorder(12, 100);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  for (double h : a.values) {
    CHECK(h >= -1.0);
    CHECK(h <= 1.0);
  }
}

TEST_CASE("disorder mean matches the law of large numbers") {
  double sum = 0.0;
  int count = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    for (double h : sample_disorder(10, seed).values) {
      sum += h;
      ++count;
    }
  }
  REQUIRE(count == 100000);
  CHECK(std::abs(sum / count) < 0.01);
}

TEST_CASE("half-filling basis enumeration is bijective") {
  const BasisDescriptor basis = BasisDescriptor::half_filling(8);
  CHECK(basis.dim == 70);
  for (Index i = 0; i < basis.dim; ++i) {
    CHECK(basis.index_of(basis.pattern_of(i)) == i);
  }
}

TEST_CASE("two-site hopping block") {
  const DisorderRealization disorder = sample_disorder(2, 1);
  const LindbladModel model = build_mbl_chain(2, 0.0, 1.0, 0.0, 0.1, disorder);
  REQUIRE(model.dim() == 2);
  // Basis order {|01>, |10>}; pure hopping with J = 1.
  CHECK(model.hamiltonian(0, 0) == Complex(0.0));
  CHECK(model.hamiltonian(1, 1) == Complex(0.0));
  CHECK(model.hamiltonian(0, 1) == Complex(-1.0));
  CHECK(model.hamiltonian(1, 0) == Complex(-1.0));
}

TEST_CASE("mbl Hamiltonian is real and Hermitian") {
  const DisorderRealization disorder = sample_disorder(6, 7);
  const LindbladModel model = build_mbl_chain(6, 3.0, 1.0, 1.0, 0.1, disorder);
  CHECK(model.dim() == 20);
  CHECK(is_hermitian(model.hamiltonian));
  CHECK(model.hamiltonian.imag().cwiseAbs().maxCoeff() == 0.0);
  for (const auto& jump : model.jumps) {
    CHECK(jump.op.imag().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("mbl jump operators conserve particle number") {
  const DisorderRealization disorder = sample_disorder(4, 21);
  const LindbladModel model = build_mbl_chain(4, 1.0, 1.0, 1.0, 0.1, disorder);
  Matrix total_number = Matrix::Zero(model.dim(), model.dim());
  for (int l = 1; l <= 4; ++l) {
    total_number += fermion_bilinear(model.basis, l, l);
  }
  for (const auto& jump : model.jumps) {
    const Matrix commutator = jump.op * total_number - total_number * jump.op;
    CHECK(max_abs(commutator) <= 1e-12);
  }
}

TEST_CASE("pair dissipator annihilates the in-phase mode") {
  const DisorderRealization disorder = sample_disorder(2, 2);
  const LindbladModel model = build_mbl_chain(2, 0.0, 1.0, 0.0, 0.1, disorder);
  // (c_1^dag + c_2^dag)|vac> in the basis {|01>, |10>}.
  Vector symmetric(2);
  symmetric << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK((model.jumps[0].op * symmetric).norm() <= 1e-14);
  // The out-of-phase mode maps onto the in-phase one, not to zero.
  Vector antisymmetric(2);
  antisymmetric << -1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK((model.jumps[0].op * antisymmetric).norm() > 1.0);
}

TEST_CASE("mbl chain rejects bad inputs") {
  const DisorderRealization disorder = sample_disorder(4, 3);
  CHECK_THROWS_AS(
      (void)build_mbl_chain(5, 1.0, 1.0, 1.0, 0.1, sample_disorder(5, 3)),
      DimensionError);
  CHECK_THROWS_AS((void)build_mbl_chain(6, 1.0, 1.0, 1.0, 0.1, disorder),
                  DimensionError);
}

TEST_CASE("neel state occupies alternating sites") {
  const BasisDescriptor b2 = BasisDescriptor::half_filling(2);
  const PureState psi2 = neel_state(b2);
  CHECK(psi2.norm_sq == 1.0);
  CHECK(psi2.amplitudes(b2.index_of(0b10)) == Complex(1.0));

  const BasisDescriptor b4 = BasisDescriptor::half_filling(4);
  const PureState psi4 = neel_state(b4);
  CHECK(psi4.amplitudes(b4.index_of(0b1010)) == Complex(1.0));

  const BasisDescriptor spin5 = BasisDescriptor::spin_chain(5);
  const PureState psi5 = neel_state(spin5);
  CHECK(psi5.amplitudes(0b10101) == Complex(1.0));
}

TEST_CASE("goe observable is symmetric and deterministic") {
  const Matrix a = sample_goe_observable(16, 5);
  const Matrix b = sample_goe_observable(16, 5);
  const Matrix c = sample_goe_observable(16, 6);
  CHECK(max_abs(a - a.transpose()) == 0.0);
  CHECK(max_abs(a - b) == 0.0);
  CHECK(max_abs(a - c) > 0.0);
  CHECK(a.imag().cwiseAbs().maxCoeff() == 0.0);

  const Matrix scalar = sample_goe_observable(1, 7);
  CHECK(scalar.rows() == 1);
}

TEST_CASE("goe spectral density follows the semicircle") {
  // Eigenvalues of (G + G^T)/2 scaled by sqrt(2/dim) follow the semicircle
  // on [-2, 2] (off-diagonal variance is 1/2).
  const Index dim = 64;
  const int n_samples = 200;
  const int bins = 16;
  std::vector<double> eigs;
  eigs.reserve(n_samples * dim);
  for (int s = 0; s < n_samples; ++s) {
    const Matrix o = sample_goe_observable(dim, 1000 + s);
    Eigen::SelfAdjointEigenSolver<Matrix> es(o, Eigen::EigenvaluesOnly);
    const double scale = std::sqrt(2.0 / static_cast<double>(dim));
    for (Index i = 0; i < dim; ++i) eigs.push_back(es.eigenvalues()(i) * scale);
  }

  std::vector<double> empirical(bins, 0.0);
  int inside = 0;
  for (double x : eigs) {
    if (x < -2.0 || x >= 2.0) continue;
    ++empirical[static_cast<int>((x + 2.0) / 4.0 * bins)];
    ++inside;
  }
  REQUIRE(inside > 0);
  for (double& e : empirical) e /= inside;

  // Semicircle bin masses by Simpson quadrature.
  auto density = [](double x) {
    return std::sqrt(std::max(0.0, 4.0 - x * x)) / (2.0 * std::numbers::pi);
  };
  double total_variation = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double lo = -2.0 + 4.0 * b / bins;
    const double hi = -2.0 + 4.0 * (b + 1) / bins;
    double mass = 0.0;
    const int steps = 200;
    for (int s = 0; s < steps; ++s) {
      const double x0 = lo + (hi - lo) * s / steps;
      const double x1 = lo + (hi - lo) * (s + 1) / steps;
      mass += (density(x0) + 4.0 * density(0.5 * (x0 + x1)) + density(x1)) *
              (x1 - x0) / 6.0;
    }
    total_variation += std::abs(empirical[b] - mass);
  }
  CHECK(total_variation < 0.05);
}
