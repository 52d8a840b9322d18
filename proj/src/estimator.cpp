#include "certctl/estimator.hpp"

#include <stdexcept>

namespace certctl::ctrl {

Vector pack_outputs(const PolicyLayout& layout, const EstimatorOutputs& out) {
  const int m = layout.m;
  Vector a(layout.action_dim());
  int at = 0;
  a.segment(at, m) = out.alpha_v;
  at += m;
  a[at++] = out.beta_v;
  for (int i = 0; i < layout.n_b; ++i) {
    a.segment(at, m) = out.alpha_b[i];
    at += m;
    a[at++] = out.beta_b[i];
  }
  for (int j = 0; j < layout.n_c; ++j) {
    a.segment(at, m) = out.alpha_c[j];
    at += m;
    a[at++] = out.beta_c[j];
  }
  return a;
}

EstimatorOutputs unpack_outputs(const PolicyLayout& layout, const Vector& action) {
  if (action.size() != layout.action_dim())
    throw std::invalid_argument("action size does not match policy layout");
  const int m = layout.m;
  EstimatorOutputs out;
  int at = 0;
  out.alpha_v = action.segment(at, m);
  at += m;
  out.beta_v = action[at++];
  out.alpha_b.resize(layout.n_b);
  out.beta_b.resize(layout.n_b);
  for (int i = 0; i < layout.n_b; ++i) {
    out.alpha_b[i] = action.segment(at, m);
    at += m;
    out.beta_b[i] = action[at++];
  }
  out.alpha_c.resize(layout.n_c);
  out.beta_c.resize(layout.n_c);
  for (int j = 0; j < layout.n_c; ++j) {
    out.alpha_c[j] = action.segment(at, m);
    at += m;
    out.beta_c[j] = action[at++];
  }
  return out;
}

EstimatorOutputs ZeroEstimator::evaluate(const Vector&, const Vector&) const {
  const PolicyLayout& l = layout();
  EstimatorOutputs out;
  out.alpha_v = Vector::Zero(l.m);
  out.beta_v = 0.0;
  out.alpha_b.assign(l.n_b, Vector::Zero(l.m));
  out.beta_b.assign(l.n_b, 0.0);
  out.alpha_c.assign(l.n_c, Vector::Zero(l.m));
  out.beta_c.assign(l.n_c, 0.0);
  return out;
}

OracleEstimator::OracleEstimator(PolicyLayout layout, dyn::PlantPair pair, clf::ResClf clf,
                                 std::vector<cbf::EcbfPtr> barriers,
                                 std::vector<ConstraintPtr> constraints)
    : UncertaintyEstimator(layout),
      pair_(std::move(pair)),
      clf_(std::move(clf)),
      barriers_(std::move(barriers)),
      constraints_(std::move(constraints)) {
  if (static_cast<int>(barriers_.size()) != layout.n_b ||
      static_cast<int>(constraints_.size()) != layout.n_c)
    throw std::invalid_argument("OracleEstimator: layout does not match barriers/constraints");
}

EstimatorOutputs OracleEstimator::evaluate(const Vector& x, const Vector& psi) const {
  const dyn::ControlAffinePlant& nominal = *pair_.nominal_plant;
  const dyn::ControlAffinePlant& truth = *pair_.true_plant;
  const dyn::MismatchTerms delta = dyn::mismatch_oracle(pair_, x);

  EstimatorOutputs out;

  // CLF row: Delta^v_1 = 2 eta^T P G Delta_1, Delta^v_2 = 2 eta^T P G Delta_2.
  const clf::TransverseState ts = clf::transverse(nominal, x);
  const RowVector two_eta_pg = 2.0 * ts.eta.transpose() * clf_.P_eps * clf_.G;
  out.beta_v = (two_eta_pg * delta.delta1)(0);
  out.alpha_v = (two_eta_pg * delta.delta2).transpose();

  // Barrier rows: evaluate B^(r_b) terms against both plants under the
  // nominal pre-control and subtract.
  const dyn::LieDerivatives nom_ld = dyn::lie_derivatives(nominal, x);
  const Matrix nom_inv = nom_ld.lg_lf_r1_h.fullPivLu().inverse();
  const Vector u_star = -nom_inv * nom_ld.lf_r_h;
  for (const auto& barrier : barriers_) {
    const auto [lf_true, lg_true] = cbf::barrier_virtual_terms(*barrier, truth, x, psi);
    const auto [lf_nom, lg_nom] = cbf::barrier_virtual_terms(*barrier, nominal, x, psi);
    const double beta = (lf_true + (lg_true * u_star)(0)) - (lf_nom + (lg_nom * u_star)(0));
    const RowVector alpha = (lg_true - lg_nom) * nom_inv;
    out.beta_b.push_back(beta);
    out.alpha_b.push_back(alpha.transpose());
  }

  // Constraint rows: Delta^c from the plant-pair subtraction.
  for (const auto& spec : constraints_) {
    const auto row_true = spec->evaluate(truth, nominal, x);
    const auto row_nom = spec->evaluate(nominal, nominal, x);
    out.beta_c.push_back(row_true.b - row_nom.b);
    out.alpha_c.push_back((row_true.a - row_nom.a).transpose());
  }
  return out;
}

}  // namespace certctl::ctrl
