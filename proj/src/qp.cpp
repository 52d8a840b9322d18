#include "certctl/qp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "certctl/linalg.hpp"

namespace certctl::linalg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEigFloor = -1e-10;  // H must be PSD up to this slack
constexpr double kRidge = 1e-10;      // lift singular PSD H to make it factorable
}  // namespace

std::string to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::Infeasible: return "infeasible";
    case QpStatus::MaxIter: return "max_iter";
  }
  return "unknown";
}

void QpProblem::validate() const {
  const Eigen::Index n = H.rows();
  if (H.cols() != n) throw std::invalid_argument("QpProblem: H must be square");
  if (c.size() != n) throw std::invalid_argument("QpProblem: c size mismatch");
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("QpProblem: H must be symmetric");
  if (eig_sym(H).minCoeff() < kEigFloor * scale)
    throw std::invalid_argument("QpProblem: H must be positive semidefinite");
  if (A_in.rows() > 0 && A_in.cols() != n)
    throw std::invalid_argument("QpProblem: A_in column count mismatch");
  if (A_in.rows() != b_in.size())
    throw std::invalid_argument("QpProblem: b_in size mismatch");
}

QpSolution solve_qp(const QpProblem& qp, const QpOptions& opts) {
  qp.validate();
  const int n = qp.dim();
  const int mc = qp.num_constraints();

  // A tiny ridge keeps the KKT solves well posed when H is only PSD; it
  // perturbs the objective by O(kRidge * ||v||^2), far below the certificate
  // tolerances used here.
  Matrix h = qp.H;
  const double min_eig = eig_sym(h).minCoeff();
  if (min_eig < kRidge) h.diagonal().array() += (kRidge - min_eig);

  Eigen::LLT<Matrix> h_chol(h);
  if (h_chol.info() != Eigen::Success)
    throw std::runtime_error("QP: Cholesky of H failed");

  QpSolution sol;
  sol.lambda = Vector::Zero(mc);
  Vector v = h_chol.solve(-qp.c);

  std::vector<int> active;
  std::vector<double> mult;

  auto finish = [&](QpStatus status, int iters) {
    sol.status = status;
    sol.v_opt = v;
    sol.iterations = iters;
    sol.active_set = active;
    Vector lam = Vector::Zero(mc);
    for (size_t i = 0; i < active.size(); ++i) lam[active[i]] = mult[i];
    sol.lambda = lam;
    Vector grad = qp.H * v + qp.c;
    if (mc > 0) grad += qp.A_in.transpose() * lam;
    sol.kkt_residual = grad.size() > 0 ? grad.cwiseAbs().maxCoeff() : 0.0;
    return sol;
  };

  if (mc == 0) return finish(QpStatus::Optimal, 0);

  int iter = 0;
  while (iter < opts.max_iter) {
    ++iter;
    // Most violated constraint.
    Vector slack = qp.A_in * v - qp.b_in;
    int p = -1;
    double worst = opts.constraint_tol;
    for (int i = 0; i < mc; ++i) {
      if (slack[i] > worst) {
        worst = slack[i];
        p = i;
      }
    }
    if (p < 0) return finish(QpStatus::Optimal, iter);

    const Vector a_p = qp.A_in.row(p).transpose();
    double lambda_p = 0.0;

    // Inner loop: step toward making p active, dropping dual-blocking
    // constraints along the way.
    bool placed = false;
    while (!placed && iter < opts.max_iter) {
      const int k = static_cast<int>(active.size());
      Vector dz(n);
      Vector dr(k);
      if (k == 0) {
        dz = h_chol.solve(-a_p);
      } else {
        Matrix kkt = Matrix::Zero(n + k, n + k);
        kkt.topLeftCorner(n, n) = h;
        Matrix nmat(n, k);
        for (int i = 0; i < k; ++i) nmat.col(i) = qp.A_in.row(active[i]).transpose();
        kkt.topRightCorner(n, k) = nmat;
        kkt.bottomLeftCorner(k, n) = nmat.transpose();
        Vector rhs = Vector::Zero(n + k);
        rhs.head(n) = -a_p;
        Vector step = kkt.fullPivLu().solve(rhs);
        dz = step.head(n);
        dr = step.tail(k);
      }

      // a_p . dz = -dz^T H dz <= 0, so rho >= 0 measures primal progress.
      const double rho = -a_p.dot(dz);
      const double viol = a_p.dot(v) - qp.b_in[p];

      double t_full = kInf;
      if (rho > 1e-14) t_full = viol / rho;

      double t_block = kInf;
      int blocker = -1;
      for (int i = 0; i < k; ++i) {
        if (dr[i] < -1e-14) {
          const double t = -mult[i] / dr[i];
          if (t < t_block) {
            t_block = t;
            blocker = i;
          }
        }
      }

      if (t_full == kInf && t_block == kInf)
        return finish(QpStatus::Infeasible, iter);

      const double t = std::min(t_full, t_block);
      v += t * dz;
      for (int i = 0; i < k; ++i) mult[i] += t * dr[i];
      lambda_p += t;

      if (t_full <= t_block) {
        active.push_back(p);
        mult.push_back(lambda_p);
        placed = true;
      } else {
        active.erase(active.begin() + blocker);
        mult.erase(mult.begin() + blocker);
        ++iter;
      }
    }
  }
  return finish(QpStatus::MaxIter, iter);
}

}  // namespace certctl::linalg
