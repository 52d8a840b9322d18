#include "certctl/fblin.hpp"

#include <cmath>
#include <stdexcept>

#include "certctl/linalg.hpp"

namespace certctl::clf {

TransverseState transverse(const dyn::ControlAffinePlant& plant, const Vector& x) {
  const int m = plant.output_dim();
  const int r = plant.relative_degree();
  TransverseState ts;
  ts.x = x;
  ts.eta.resize(m * r);
  ts.eta.head(m) = plant.h(x);
  for (int k = 1; k < r; ++k) ts.eta.segment(k * m, m) = plant.lf_h(x, k);
  return ts;
}

Vector io_linearizing_input(const dyn::ControlAffinePlant& plant, const Vector& x,
                            const Vector& mu) {
  const dyn::LieDerivatives ld = dyn::lie_derivatives(plant, x);
  return ld.lg_lf_r1_h.fullPivLu().solve(mu - ld.lf_r_h);
}

void make_fg(int m, int r, Matrix& f, Matrix& g) {
  f = Matrix::Zero(m * r, m * r);
  for (int k = 0; k + 1 < r; ++k)
    f.block(k * m, (k + 1) * m, m, m) = Matrix::Identity(m, m);
  g = Matrix::Zero(m * r, m);
  g.bottomRows(m) = Matrix::Identity(m, m);
}

std::vector<double> monic_from_poles(const std::vector<double>& poles) {
  if (poles.empty()) throw std::invalid_argument("pole list must be nonempty");
  for (double p : poles)
    if (p >= 0.0) throw std::invalid_argument("poles must be negative reals");
  // Multiply out prod (s - p_i); coeffs[j] is the s^j coefficient.
  std::vector<double> coeffs{1.0};
  for (double p : poles) {
    std::vector<double> next(coeffs.size() + 1, 0.0);
    for (size_t j = 0; j < coeffs.size(); ++j) {
      next[j + 1] += coeffs[j];
      next[j] += -p * coeffs[j];
    }
    coeffs = next;
  }
  coeffs.pop_back();  // drop the leading monic coefficient
  return coeffs;
}

ResClf build_res_clf(int m, int r, const std::vector<double>& poles, double epsilon,
                     double lambda, const Matrix& q) {
  if (m <= 0 || r <= 0) throw std::invalid_argument("build_res_clf: bad dimensions");
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("build_res_clf: epsilon must be in (0, 1]");
  if (static_cast<int>(poles.size()) != r)
    throw std::invalid_argument("build_res_clf: need r poles");
  if (q.rows() != m * r || q.cols() != m * r)
    throw std::invalid_argument("build_res_clf: Q must be mr x mr");

  ResClf clf;
  clf.m = m;
  clf.r = r;
  clf.epsilon = epsilon;
  clf.Q = q;
  make_fg(m, r, clf.F, clf.G);

  const std::vector<double> a = monic_from_poles(poles);
  clf.K = Matrix::Zero(m, m * r);
  for (int j = 0; j < r; ++j) {
    const double scale = -a[j] / std::pow(epsilon, r - j);
    clf.K.block(0, j * m, m, m) = scale * Matrix::Identity(m, m);
  }
  clf.A = clf.F + clf.G * clf.K;
  if (!linalg::is_hurwitz(clf.A))
    throw std::invalid_argument("build_res_clf: closed loop is not Hurwitz");

  clf.P_eps = linalg::solve_lyapunov(clf.A, q);
  const Vector p_eigs = linalg::eig_sym(clf.P_eps);
  clf.c1 = p_eigs.minCoeff();
  clf.c2_over_eps2 = p_eigs.maxCoeff();
  if (clf.c1 <= 0.0) throw std::runtime_error("build_res_clf: P_eps not positive definite");

  if (lambda > 0.0) {
    clf.lambda = lambda;
  } else {
    const Vector q_eigs = linalg::eig_sym(q);
    clf.lambda = 0.5 * q_eigs.minCoeff() / clf.c2_over_eps2;
  }
  return clf;
}

ClfDerivatives clf_lie_derivatives(const ResClf& clf, const Vector& eta) {
  if (eta.size() != clf.eta_dim())
    throw std::invalid_argument("clf_lie_derivatives: eta dimension mismatch");
  ClfDerivatives d;
  d.V = eta.dot(clf.P_eps * eta);
  d.LfV = eta.dot((clf.F.transpose() * clf.P_eps + clf.P_eps * clf.F) * eta);
  d.LgV = 2.0 * eta.transpose() * clf.P_eps * clf.G;
  return d;
}

}  // namespace certctl::clf
