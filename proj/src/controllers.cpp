#include "certctl/controllers.hpp"

#include <stdexcept>

namespace certctl::ctrl {

ControllerVariant variant_from_string(const std::string& s) {
  if (s == "clf-qp") return ControllerVariant::ClfQp;
  if (s == "cbf-clf-qp") return ControllerVariant::CbfClfQp;
  if (s == "io-rl-clf-qp") return ControllerVariant::IoRlClfQp;
  if (s == "rl-clf-qp") return ControllerVariant::RlClfQp;
  if (s == "rl-cbf-clf-qp") return ControllerVariant::RlCbfClfQp;
  throw std::invalid_argument("unknown controller variant: " + s);
}

std::string to_string(ControllerVariant v) {
  switch (v) {
    case ControllerVariant::ClfQp: return "clf-qp";
    case ControllerVariant::CbfClfQp: return "cbf-clf-qp";
    case ControllerVariant::IoRlClfQp: return "io-rl-clf-qp";
    case ControllerVariant::RlClfQp: return "rl-clf-qp";
    case ControllerVariant::RlCbfClfQp: return "rl-cbf-clf-qp";
  }
  return "unknown";
}

bool variant_uses_policy(ControllerVariant v) {
  return v == ControllerVariant::IoRlClfQp || v == ControllerVariant::RlClfQp ||
         v == ControllerVariant::RlCbfClfQp;
}

bool variant_uses_barriers(ControllerVariant v) {
  return v == ControllerVariant::CbfClfQp || v == ControllerVariant::RlCbfClfQp;
}

namespace {

struct PreControl {
  Vector u_star;
  Matrix d_inv;  // (L_g~ L_f~^{r-1} h)^{-1}
};

PreControl pre_control(const dyn::ControlAffinePlant& nominal, const Vector& x) {
  const dyn::LieDerivatives ld = dyn::lie_derivatives(nominal, x);
  PreControl pc;
  pc.d_inv = ld.lg_lf_r1_h.fullPivLu().inverse();
  pc.u_star = -pc.d_inv * ld.lf_r_h;
  return pc;
}

EstimatorOutputs zero_outputs(int m, int n_b, int n_c) {
  EstimatorOutputs out;
  out.alpha_v = Vector::Zero(m);
  out.alpha_b.assign(n_b, Vector::Zero(m));
  out.beta_b.assign(n_b, 0.0);
  out.alpha_c.assign(n_c, Vector::Zero(m));
  out.beta_c.assign(n_c, 0.0);
  return out;
}

Vector clip(const Vector& u, std::optional<double> u_max) {
  if (!u_max) return u;
  return u.cwiseMax(-*u_max).cwiseMin(*u_max);
}

/// Shared assembly for all QP-based variants. `policy` null means nominal
/// rows. `relaxed` adds the slack d on the CLF row with penalty p.
ControllerOutput solve_qp_controller(const clf::ResClf& clf,
                                     const std::vector<cbf::EcbfPtr>& barriers,
                                     const std::vector<ConstraintPtr>& constraints,
                                     const dyn::ControlAffinePlant& nominal,
                                     const Vector& x, const Vector& psi,
                                     const UncertaintyEstimator* policy, bool relaxed,
                                     double relax_penalty, std::optional<double> u_max,
                                     const linalg::QpOptions& opts) {
  const int m = nominal.input_dim();
  const int n_b = static_cast<int>(barriers.size());
  const int n_c = static_cast<int>(constraints.size());
  const int dim = m + (relaxed ? 1 : 0);

  if (policy) {
    const PolicyLayout& l = policy->layout();
    if (l.m != m || l.n_b != n_b || l.n_c != n_c)
      throw std::invalid_argument("policy layout does not match controller configuration");
  }

  const clf::TransverseState ts = clf::transverse(nominal, x);
  const clf::ClfDerivatives cd = clf::clf_lie_derivatives(clf, ts.eta);
  const PreControl pc = pre_control(nominal, x);
  const EstimatorOutputs est =
      policy ? policy->evaluate(x, psi) : zero_outputs(m, n_b, n_c);

  int rows = 1 + n_b + n_c + (u_max ? 2 * m : 0);
  linalg::QpProblem qp;
  qp.H = 2.0 * Matrix::Identity(dim, dim);
  if (relaxed) qp.H(m, m) = 2.0 * relax_penalty;
  qp.c = Vector::Zero(dim);
  qp.A_in = Matrix::Zero(rows, dim);
  qp.b_in = Vector::Zero(rows);

  int at = 0;
  // CLF: (LgV + alpha_v^T) mu - d <= -(LfV + beta_v + (lambda/eps) V).
  const RowVector clf_slope = cd.LgV + est.alpha_v.transpose();
  qp.A_in.block(at, 0, 1, m) = clf_slope;
  if (relaxed) qp.A_in(at, m) = -1.0;
  qp.b_in[at] = -(cd.LfV + est.beta_v + clf.rate() * cd.V);
  ++at;

  // Barriers: -(a_hat) mu <= b_hat + K_b eta_b, with
  // b_hat = Lf^rb B~ + LgLf B~ u* + beta_B and a_hat = LgLf B~ D~^{-1} + alpha_B^T.
  struct BarrierAffine {
    double b_hat;
    RowVector a_hat;
  };
  std::vector<BarrierAffine> bars(n_b);
  Vector barrier_values(n_b);
  for (int i = 0; i < n_b; ++i) {
    const auto& ecbf = *barriers[i];
    const auto [lf_nom, lg_nom] = cbf::barrier_virtual_terms(ecbf, nominal, x, psi);
    bars[i].b_hat = lf_nom + (lg_nom * pc.u_star)(0) + est.beta_b[i];
    bars[i].a_hat = lg_nom * pc.d_inv + est.alpha_b[i].transpose();
    const Vector eta_b = cbf::barrier_eta(ecbf, nominal, x, psi);
    barrier_values[i] = eta_b[0];
    qp.A_in.block(at, 0, 1, m) = -bars[i].a_hat;
    qp.b_in[at] = bars[i].b_hat + (ecbf.k_b() * eta_b)(0);
    ++at;
  }

  // Affine constraints: (a_c~ + alpha_C^T) mu <= -(b_c~ + beta_C).
  struct ConstraintAffine {
    double b_hat;
    RowVector a_hat;
  };
  std::vector<ConstraintAffine> cons(n_c);
  for (int j = 0; j < n_c; ++j) {
    const auto row = constraints[j]->evaluate(nominal, nominal, x);
    cons[j].a_hat = row.a + est.alpha_c[j].transpose();
    cons[j].b_hat = row.b + est.beta_c[j];
    qp.A_in.block(at, 0, 1, m) = cons[j].a_hat;
    qp.b_in[at] = -cons[j].b_hat;
    ++at;
  }

  // Saturation mapped through u = u* + D~^{-1} mu.
  if (u_max) {
    qp.A_in.block(at, 0, m, m) = pc.d_inv;
    qp.b_in.segment(at, m) = Vector::Constant(m, *u_max) - pc.u_star;
    at += m;
    qp.A_in.block(at, 0, m, m) = -pc.d_inv;
    qp.b_in.segment(at, m) = Vector::Constant(m, *u_max) + pc.u_star;
    at += m;
  }

  const linalg::QpSolution sol = linalg::solve_qp(qp, opts);

  ControllerOutput out;
  out.qp_status = sol.status;
  out.diag.eta = ts.eta;
  out.diag.V = cd.V;
  out.diag.barrier_values = barrier_values;
  out.diag.kkt_residual = sol.kkt_residual;
  if (sol.status == linalg::QpStatus::Optimal) {
    out.mu = sol.v_opt.head(m);
    out.d = relaxed ? sol.v_opt[m] : 0.0;
    out.u = clip(pc.u_star + pc.d_inv * out.mu, u_max);
  } else {
    out.mu = Vector::Zero(m);
    out.d = 0.0;
    out.u = Vector::Zero(m);
  }
  out.diag.vdot_estimate = cd.LfV + est.beta_v + (clf_slope * out.mu)(0);
  out.mu_b.resize(n_b);
  for (int i = 0; i < n_b; ++i) out.mu_b[i] = bars[i].b_hat + (bars[i].a_hat * out.mu)(0);
  out.diag.constraint_values.resize(n_c);
  for (int j = 0; j < n_c; ++j)
    out.diag.constraint_values[j] = cons[j].b_hat + (cons[j].a_hat * out.mu)(0);
  return out;
}

}  // namespace

double estimate_vdot(const UncertaintyEstimator& policy, const clf::ResClf& clf,
                     const dyn::ControlAffinePlant& nominal, const Vector& x,
                     const Vector& mu, const Vector& psi) {
  const clf::TransverseState ts = clf::transverse(nominal, x);
  const clf::ClfDerivatives cd = clf::clf_lie_derivatives(clf, ts.eta);
  const EstimatorOutputs est = policy.evaluate(x, psi);
  return clf::vdot_nominal(cd, mu) + est.beta_v + est.alpha_v.dot(mu);
}

double estimate_b_deriv(const UncertaintyEstimator& policy, const cbf::Ecbf& ecbf,
                        int barrier_index, const dyn::ControlAffinePlant& nominal,
                        const Vector& x, const Vector& psi, const Vector& mu) {
  const EstimatorOutputs est = policy.evaluate(x, psi);
  if (barrier_index < 0 || barrier_index >= static_cast<int>(est.alpha_b.size()))
    throw std::invalid_argument("barrier index outside policy layout");
  const PreControl pc = pre_control(nominal, x);
  const auto [lf_nom, lg_nom] = cbf::barrier_virtual_terms(ecbf, nominal, x, psi);
  const double b_tilde = lf_nom + (lg_nom * (pc.u_star + pc.d_inv * mu))(0);
  return b_tilde + est.beta_b[barrier_index] + est.alpha_b[barrier_index].dot(mu);
}

double estimate_constraint_row(const UncertaintyEstimator& policy,
                               const AffineConstraintSpec& spec, int row_index,
                               const dyn::ControlAffinePlant& nominal, const Vector& x,
                               const Vector& mu, const Vector& psi) {
  const EstimatorOutputs est = policy.evaluate(x, psi);
  if (row_index < 0 || row_index >= static_cast<int>(est.alpha_c.size()))
    throw std::invalid_argument("constraint index outside policy layout");
  const auto row = spec.evaluate(nominal, nominal, x);
  return (row.b + est.beta_c[row_index]) +
         ((row.a + est.alpha_c[row_index].transpose()) * mu)(0);
}

ControllerOutput solve_clf_qp(const clf::ResClf& clf, const dyn::ControlAffinePlant& plant,
                              const Vector& x, std::optional<double> u_max,
                              const linalg::QpOptions& opts) {
  return solve_qp_controller(clf, {}, {}, plant, x, Vector(), nullptr,
                             /*relaxed=*/false, 0.0, u_max, opts);
}

ControllerOutput solve_cbf_clf_qp(const clf::ResClf& clf,
                                  const std::vector<cbf::EcbfPtr>& ecbfs,
                                  const std::vector<ConstraintPtr>& constraints,
                                  const dyn::ControlAffinePlant& plant, const Vector& x,
                                  const Vector& psi, double relax_penalty,
                                  std::optional<double> u_max,
                                  const linalg::QpOptions& opts) {
  return solve_qp_controller(clf, ecbfs, constraints, plant, x, psi, nullptr,
                             /*relaxed=*/true, relax_penalty, u_max, opts);
}

ControllerOutput solve_rl_clf_qp(const UncertaintyEstimator& policy, const clf::ResClf& clf,
                                 const dyn::ControlAffinePlant& nominal, const Vector& x,
                                 const Vector& psi, std::optional<double> u_max,
                                 const linalg::QpOptions& opts) {
  return solve_qp_controller(clf, {}, {}, nominal, x, psi, &policy,
                             /*relaxed=*/false, 0.0, u_max, opts);
}

ControllerOutput solve_rl_cbf_clf_qp(const UncertaintyEstimator& policy,
                                     const clf::ResClf& clf,
                                     const std::vector<cbf::EcbfPtr>& ecbfs,
                                     const std::vector<ConstraintPtr>& constraints,
                                     const dyn::ControlAffinePlant& nominal,
                                     const Vector& x, const Vector& psi,
                                     double relax_penalty, std::optional<double> u_max,
                                     const linalg::QpOptions& opts) {
  return solve_qp_controller(clf, ecbfs, constraints, nominal, x, psi, &policy,
                             /*relaxed=*/true, relax_penalty, u_max, opts);
}

ControllerOutput io_rl_input(const UncertaintyEstimator& policy, const clf::ResClf& clf,
                             const dyn::ControlAffinePlant& nominal, const Vector& x,
                             std::optional<double> u_max, const linalg::QpOptions& opts) {
  const PolicyLayout& l = policy.layout();
  if (l.n_b != 0 || l.n_c != 0)
    throw std::invalid_argument("io_rl_input expects an (alpha, beta)-only policy layout");

  ControllerOutput out = solve_clf_qp(clf, nominal, x, u_max, opts);
  if (out.qp_status != linalg::QpStatus::Optimal) return out;

  const EstimatorOutputs est = policy.evaluate(x, Vector());
  const PreControl pc = pre_control(nominal, x);
  const Vector correction = est.alpha_v.asDiagonal() * out.mu +
                            Vector::Constant(nominal.input_dim(), est.beta_v);
  out.u = clip(out.u + pc.d_inv * correction, u_max);
  return out;
}

ControllerOutput run_controller(ControllerVariant variant, const ControllerSetup& setup,
                                const UncertaintyEstimator* policy, const Vector& x,
                                const Vector& psi) {
  if (variant_uses_policy(variant) && !policy)
    throw std::invalid_argument("controller variant requires a policy");
  switch (variant) {
    case ControllerVariant::ClfQp:
      return solve_clf_qp(setup.clf, *setup.nominal, x, setup.u_max, setup.qp_options);
    case ControllerVariant::CbfClfQp:
      return solve_cbf_clf_qp(setup.clf, setup.barriers, setup.constraints, *setup.nominal,
                              x, psi, setup.relax_penalty, setup.u_max, setup.qp_options);
    case ControllerVariant::IoRlClfQp:
      return io_rl_input(*policy, setup.clf, *setup.nominal, x, setup.u_max,
                         setup.qp_options);
    case ControllerVariant::RlClfQp:
      return solve_rl_clf_qp(*policy, setup.clf, *setup.nominal, x, psi, setup.u_max,
                             setup.qp_options);
    case ControllerVariant::RlCbfClfQp:
      return solve_rl_cbf_clf_qp(*policy, setup.clf, setup.barriers, setup.constraints,
                                 *setup.nominal, x, psi, setup.relax_penalty, setup.u_max,
                                 setup.qp_options);
  }
  throw std::logic_error("unreachable controller variant");
}

}  // namespace certctl::ctrl
