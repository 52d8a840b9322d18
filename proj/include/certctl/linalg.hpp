#pragma once

#include "certctl/types.hpp"

namespace certctl::linalg {

/// Largest real part over the (possibly complex) eigenvalues of a square matrix.
double max_eigenvalue_real_part(const Matrix& a);

/// True if all eigenvalues of `a` have strictly negative real part.
bool is_hurwitz(const Matrix& a, double margin = 0.0);

/// Eigenvalues of a symmetric matrix, sorted ascending.
/// Throws std::invalid_argument if `m` is not symmetric (within 1e-12,
/// relative to the largest entry). If `vectors` is non-null it receives the
/// matching orthonormal eigenvectors as columns.
Vector eig_sym(const Matrix& m, Matrix* vectors = nullptr);

/// Solves the continuous Lyapunov equation  A^T P + P A = -Q  via Kronecker
/// vectorization and a dense LU solve. Requires A Hurwitz and Q symmetric
/// positive definite; the result is symmetrized before returning.
/// Throws std::invalid_argument("unstable closed-loop matrix") if A is not
/// Hurwitz, and std::runtime_error if the vectorized system is singular.
Matrix solve_lyapunov(const Matrix& a, const Matrix& q);

}  // namespace certctl::linalg
