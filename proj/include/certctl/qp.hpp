#pragma once

#include <string>
#include <vector>

#include "certctl/types.hpp"

namespace certctl::linalg {

// Solver tolerances and limits for the dense QP solver.
struct QpOptions {
  double constraint_tol = 1e-8;    // feasibility: A v - b <= tol
  double stationarity_tol = 1e-6;  // ||H v + c + A^T lambda||_inf
  int max_iter = 200;
};

enum class QpStatus { Optimal, Infeasible, MaxIter };

std::string to_string(QpStatus s);

/// min 1/2 v^T H v + c^T v  s.t.  A_in v <= b_in
/// (controller objectives mu^T mu + p d^2 map to H = diag(2 I, 2p), c = 0).
struct QpProblem {
  Matrix H;
  Vector c;
  Matrix A_in;  // may have zero rows
  Vector b_in;

  int dim() const { return static_cast<int>(H.rows()); }
  int num_constraints() const { return static_cast<int>(A_in.rows()); }
  /// Throws std::invalid_argument on asymmetric/indefinite H or shape mismatch.
  void validate() const;
};

struct QpSolution {
  Vector v_opt;
  QpStatus status = QpStatus::Infeasible;
  double kkt_residual = 0.0;          // stationarity residual, inf-norm
  std::vector<int> active_set;        // indices of binding constraints
  Vector lambda;                      // multipliers, full length (zeros off the active set)
  int iterations = 0;

  double objective(const QpProblem& qp) const {
    return 0.5 * v_opt.dot(qp.H * v_opt) + qp.c.dot(v_opt);
  }
};

/// Dual active-set method (Goldfarb & Idnani). Starts from the unconstrained
/// minimizer and adds violated constraints one at a time, dropping blocking
/// ones via dual steps. Finite termination on these problem sizes; infeasible
/// sets are reported through `status`, never thrown.
QpSolution solve_qp(const QpProblem& qp, const QpOptions& opts = {});

}  // namespace certctl::linalg
