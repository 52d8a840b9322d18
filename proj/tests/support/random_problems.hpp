#pragma once

#include <random>

#include "certctl/qp.hpp"

namespace certctl::testsupport {

/// Random strictly feasible inequality QP: H = A^T A + 0.1 I, b chosen so a
/// random interior point has positive slack on every row.
inline linalg::QpProblem random_feasible_qp(std::mt19937_64& rng, int dim, int rows) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a = Matrix::NullaryExpr(dim, dim, [&]() { return gauss(rng); });
  linalg::QpProblem qp;
  qp.H = a.transpose() * a + 0.1 * Matrix::Identity(dim, dim);
  qp.c = Vector::NullaryExpr(dim, [&]() { return gauss(rng); });
  qp.A_in = Matrix::NullaryExpr(rows, dim, [&]() { return gauss(rng); });
  const Vector interior = Vector::NullaryExpr(dim, [&]() { return gauss(rng); });
  std::uniform_real_distribution<double> slack(0.0, 2.0);
  qp.b_in.resize(rows);
  for (int i = 0; i < rows; ++i) qp.b_in[i] = (qp.A_in.row(i) * interior)(0) + slack(rng);
  return qp;
}

/// Random Hurwitz matrix: shift a Gaussian matrix left of the imaginary axis.
inline Matrix random_hurwitz(std::mt19937_64& rng, int n, double margin = 0.5) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a = Matrix::NullaryExpr(n, n, [&]() { return gauss(rng); });
  a -= (linalg::max_eigenvalue_real_part(a) + margin) * Matrix::Identity(n, n);
  return a;
}

inline Matrix random_spd(std::mt19937_64& rng, int n, double ridge = 0.1) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix b = Matrix::NullaryExpr(n, n, [&]() { return gauss(rng); });
  return b.transpose() * b + ridge * Matrix::Identity(n, n);
}

}  // namespace certctl::testsupport
