#pragma once

#include "dqc/types.hpp"

namespace dqc {

inline constexpr double kHermitianTol = 1e-12;

bool is_hermitian(const Matrix& a, double tol = kHermitianTol);

// Largest entrywise |a_ij|.
double max_abs(const Matrix& a);

// Kronecker product, row-major pairing: out(i*db+k, j*db+l) = a(i,j)*b(k,l).
Matrix kron(const Matrix& a, const Matrix& b);

// exp(t*a), dense scaling-and-squaring.
Matrix matexp(const Matrix& a, double t = 1.0);

// <psi|o|psi> / <psi|psi> for Hermitian o. Dividing by the norm makes the
// value insensitive to the decaying norm of an unraveled state.
double expectation(const Matrix& o, const PureState& psi);

// (1/2) sum of singular values of (rho_a - rho_b).
double trace_distance(const Matrix& rho_a, const Matrix& rho_b);

// Validates trace one, hermiticity and positive semidefiniteness.
void check_density_matrix(const Matrix& rho, double tol = 1e-8);

}  // namespace dqc
