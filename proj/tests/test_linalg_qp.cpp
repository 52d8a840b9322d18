#include <random>

#include "certctl/linalg.hpp"
#include "certctl/qp.hpp"
#include "certctl/selftest.hpp"
#include "doctest.h"
#include "support/random_problems.hpp"

using namespace certctl;
using namespace certctl::linalg;
using certctl::testsupport::random_feasible_qp;
using certctl::testsupport::random_hurwitz;
using certctl::testsupport::random_spd;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

void check_kkt(const QpProblem& qp, const QpSolution& sol) {
  REQUIRE(sol.status == QpStatus::Optimal);
  if (qp.num_constraints() > 0) {
    const Vector slack = qp.A_in * sol.v_opt - qp.b_in;
    CHECK(slack.maxCoeff() <= 1e-8);
    CHECK(sol.lambda.minCoeff() >= -1e-12);
    // complementary slackness
    for (int i = 0; i < qp.num_constraints(); ++i)
      CHECK(std::abs(sol.lambda[i] * slack[i]) <= 1e-6);
  }
  CHECK(sol.kkt_residual <= 1e-6);
}

}  // namespace

TEST_CASE("solve_lyapunov diagonal case") {
  const Matrix a = -Matrix::Identity(2, 2);
  const Matrix q = 2.0 * Matrix::Identity(2, 2);
  const Matrix p = solve_lyapunov(a, q);
  CHECK((p - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("solve_lyapunov 2x2 against hand-solved system") {
  // A = [[0,1],[-1,-1]], Q = I. Writing P = [[p1,p2],[p2,p3]], the equation
  // A^T P + P A = -I reduces to -2 p2 = -1, p1 - p2 - p3 = 0, 2 p2 - 2 p3 = -1,
  // so p2 = 0.5, p3 = 1, p1 = 1.5.
  const Matrix a = mat2(0, 1, -1, -1);
  const Matrix p = solve_lyapunov(a, Matrix::Identity(2, 2));
  CHECK(p(0, 0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(p(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solve_lyapunov rejects non-Hurwitz A") {
  const Matrix a = mat2(0, 1, 1, 0);  // eigenvalues +-1
  CHECK_THROWS_WITH_AS(solve_lyapunov(a, Matrix::Identity(2, 2)),
                       "unstable closed-loop matrix", std::invalid_argument);
}

TEST_CASE("solve_lyapunov residual and definiteness on random Hurwitz systems") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 5;  // up to 6
    const Matrix a = random_hurwitz(rng, n);
    const Matrix q = random_spd(rng, n);
    const Matrix p = solve_lyapunov(a, q);
    CHECK((a.transpose() * p + p * a + q).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(eig_sym(p).minCoeff() > 0.0);
  }
}

TEST_CASE("eig_sym basics") {
  CHECK((eig_sym(Matrix::Identity(2, 2)) - Vector::Ones(2)).cwiseAbs().maxCoeff() <= 1e-14);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 3;
  const Vector ev = eig_sym(d);
  CHECK(ev[0] == doctest::Approx(2.0));
  CHECK(ev[1] == doctest::Approx(3.0));

  // Characteristic polynomial of [[1.5,0.5],[0.5,1.0]] is
  // l^2 - 2.5 l + 1.25, roots (2.5 +- sqrt(1.25))/2, both positive.
  const Vector p_eigs = eig_sym(mat2(1.5, 0.5, 0.5, 1.0));
  CHECK(p_eigs.minCoeff() > 0.0);
  CHECK(p_eigs[0] == doctest::Approx(0.6909830056250525).epsilon(1e-12));
  CHECK(p_eigs[1] == doctest::Approx(1.8090169943749475).epsilon(1e-12));

  CHECK_THROWS_AS(eig_sym(mat2(0, 1, 0, 0)), std::invalid_argument);
}

TEST_CASE("eig_sym residual property") {
  std::mt19937_64 rng(102);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = random_spd(rng, 3 + trial % 4, 0.0) - Matrix::Identity(3 + trial % 4, 3 + trial % 4);
    Matrix vecs;
    const Vector vals = eig_sym(m, &vecs);
    for (int i = 0; i < vals.size(); ++i) {
      const double resid = (m * vecs.col(i) - vals[i] * vecs.col(i)).norm();
      CHECK(resid <= 1e-8 * std::max(1.0, m.norm()));
    }
    for (int i = 1; i < vals.size(); ++i) CHECK(vals[i] >= vals[i - 1]);
  }
}

TEST_CASE("solve_qp unconstrained and active bound") {
  QpProblem qp;
  qp.H = 2.0 * Matrix::Identity(1, 1);
  qp.c = Vector::Zero(1);
  qp.A_in = Matrix::Zero(0, 1);
  qp.b_in = Vector::Zero(0);
  auto sol = solve_qp(qp);
  REQUIRE(sol.status == QpStatus::Optimal);
  CHECK(std::abs(sol.v_opt[0]) <= 1e-14);

  qp.A_in = -Matrix::Identity(1, 1);  // -v <= -1, i.e. v >= 1
  qp.b_in = -Vector::Ones(1);
  sol = solve_qp(qp);
  REQUIRE(sol.status == QpStatus::Optimal);
  CHECK(sol.v_opt[0] == doctest::Approx(1.0).epsilon(1e-10));
  check_kkt(qp, sol);
}

TEST_CASE("solve_qp matches the projected-gradient oracle on a fixed 4-dim problem") {
  std::mt19937_64 rng(7);
  const QpProblem qp = random_feasible_qp(rng, 4, 6);
  const auto sol = solve_qp(qp);
  REQUIRE(sol.status == QpStatus::Optimal);
  const double oracle = selftest::pgd_qp_objective(qp, 200000);
  CHECK(std::abs(sol.objective(qp) - oracle) <= 1e-6);
}

TEST_CASE("solve_qp agrees with the oracle and satisfies KKT on random problems") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 2 + trial % 7;  // up to 8
    const int rows = 2 + trial % 12;
    const QpProblem qp = random_feasible_qp(rng, dim, rows);
    const auto sol = solve_qp(qp);
    check_kkt(qp, sol);
    const double oracle = selftest::pgd_qp_objective(qp, 60000);
    CHECK(std::abs(sol.objective(qp) - oracle) <= 1e-5);
  }
}

TEST_CASE("solve_qp reports infeasible without throwing") {
  QpProblem qp;
  qp.H = 2.0 * Matrix::Identity(1, 1);
  qp.c = Vector::Zero(1);
  qp.A_in.resize(2, 1);
  qp.A_in << 1.0, -1.0;  // v <= -1 and v >= 1
  qp.b_in.resize(2);
  qp.b_in << -1.0, -1.0;
  const auto sol = solve_qp(qp);
  CHECK(sol.status == QpStatus::Infeasible);
}

TEST_CASE("solve_qp validates the problem") {
  QpProblem qp;
  qp.H = mat2(1, 2, 0, 1);  // asymmetric
  qp.c = Vector::Zero(2);
  qp.A_in = Matrix::Zero(0, 2);
  qp.b_in = Vector::Zero(0);
  CHECK_THROWS_AS(solve_qp(qp), std::invalid_argument);

  qp.H = mat2(1, 0, 0, -1);  // indefinite
  CHECK_THROWS_AS(solve_qp(qp), std::invalid_argument);
}

TEST_CASE("solve_qp is deterministic") {
  std::mt19937_64 rng(104);
  const QpProblem qp = random_feasible_qp(rng, 5, 9);
  const auto a = solve_qp(qp);
  const auto b = solve_qp(qp);
  REQUIRE(a.status == b.status);
  CHECK((a.v_opt.array() == b.v_opt.array()).all());
  CHECK((a.lambda.array() == b.lambda.array()).all());
}
