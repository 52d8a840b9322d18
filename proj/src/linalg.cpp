#include "certctl/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace certctl::linalg {

double max_eigenvalue_real_part(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix must be square");
  Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Matrix& a, double margin) {
  return max_eigenvalue_real_part(a) < -margin;
}

Vector eig_sym(const Matrix& m, Matrix* vectors) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  if (vectors) *vectors = es.eigenvectors();
  return es.eigenvalues();
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& q) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("A must be square");
  if (q.rows() != n || q.cols() != n) throw std::invalid_argument("Q must match A");
  const Vector q_eigs = eig_sym(q);
  if (q_eigs.minCoeff() <= 0.0) throw std::invalid_argument("Q must be positive definite");
  if (!is_hurwitz(a)) throw std::invalid_argument("unstable closed-loop matrix");

  // vec(A^T P + P A) = (I (x) A^T + A^T (x) I) vec(P), column-major vec.
  const Matrix at = a.transpose();
  Matrix k = Matrix::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    k.block(i * n, i * n, n, n) += at;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index r = 0; r < n; ++r)
        k(i * n + r, j * n + r) += at(i, j);

  Vector rhs(n * n);
  for (Eigen::Index j = 0; j < n; ++j)
    rhs.segment(j * n, n) = -q.col(j);

  Eigen::FullPivLU<Matrix> lu(k);
  if (!lu.isInvertible()) throw std::runtime_error("singular Lyapunov system");
  const Vector p_vec = lu.solve(rhs);

  Matrix p(n, n);
  for (Eigen::Index j = 0; j < n; ++j) p.col(j) = p_vec.segment(j * n, n);
  p = 0.5 * (p + p.transpose().eval());
  return p;
}

}  // namespace certctl::linalg
