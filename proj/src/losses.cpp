#include "certctl/losses.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace certctl::learn {

std::vector<double> numerical_derivative(const std::vector<double>& values, double ts) {
  if (values.size() < 2)
    throw std::invalid_argument("numerical_derivative: need at least 2 samples");
  if (ts <= 0.0) throw std::invalid_argument("numerical_derivative: ts must be positive");
  std::vector<double> out(values.size());
  out[0] = std::numeric_limits<double>::quiet_NaN();
  for (size_t k = 1; k < values.size(); ++k) out[k] = (values[k] - values[k - 1]) / ts;
  return out;
}

StepLosses compute_step_losses(const ctrl::UncertaintyEstimator& policy,
                               const clf::ResClf& clf,
                               const std::vector<cbf::EcbfPtr>& ecbfs,
                               const std::vector<ctrl::ConstraintPtr>& specs,
                               const dyn::ControlAffinePlant& nominal, const Vector& x,
                               const Vector& mu, const Vector& psi, const Vector& x_next,
                               double ts) {
  StepLosses out;
  out.valid = true;

  // Vdot truth from the recorded V samples bracketing this step.
  const auto v_of = [&](const Vector& state) {
    return clf::clf_lie_derivatives(clf, clf::transverse(nominal, state).eta).V;
  };
  const double vdot_truth = (v_of(x_next) - v_of(x)) / ts;
  const double vdot_est = ctrl::estimate_vdot(policy, clf, nominal, x, mu, psi);
  out.l_v = (vdot_truth - vdot_est) * (vdot_truth - vdot_est);

  out.l_b.resize(ecbfs.size());
  for (size_t i = 0; i < ecbfs.size(); ++i) {
    const auto& ecbf = *ecbfs[i];
    const int rb = ecbf.relative_degree();
    // One numerical differentiation of B^(r_b - 1) regardless of r_b.
    const double low_prev = rb == 1 ? ecbf.value(x, psi) : ecbf.lf_b(nominal, x, psi, rb - 1);
    const double low_next =
        rb == 1 ? ecbf.value(x_next, psi) : ecbf.lf_b(nominal, x_next, psi, rb - 1);
    const double b_truth = (low_next - low_prev) / ts;
    const double b_est = ctrl::estimate_b_deriv(policy, ecbf, static_cast<int>(i), nominal,
                                                x, psi, mu);
    out.l_b[i] = (b_truth - b_est) * (b_truth - b_est);
  }

  out.l_c.resize(specs.size());
  for (size_t j = 0; j < specs.size(); ++j) {
    const double z_truth = specs[j]->measure(x, x_next, ts);
    const double z_est = ctrl::estimate_constraint_row(policy, *specs[j],
                                                       static_cast<int>(j), nominal, x, mu, psi);
    out.l_c[j] = (z_truth - z_est) * (z_truth - z_est);
  }
  return out;
}

std::vector<StepLosses> compute_losses(const sim::EpisodeTrace& trace,
                                       const ctrl::UncertaintyEstimator& policy,
                                       const clf::ResClf& clf,
                                       const std::vector<cbf::EcbfPtr>& ecbfs,
                                       const std::vector<ctrl::ConstraintPtr>& specs,
                                       const dyn::ControlAffinePlant& nominal) {
  const int n = trace.steps();
  std::vector<StepLosses> out(n);
  for (int k = 0; k < n; ++k) {
    if (trace.status[k] != linalg::QpStatus::Optimal) continue;  // excluded
    const Vector& x_next = (k + 1 < n) ? trace.x[k + 1] : trace.x_final;
    out[k] = compute_step_losses(policy, clf, ecbfs, specs, nominal, trace.x[k],
                                 trace.mu[k], trace.psi, x_next, trace.ts);
  }
  return out;
}

double compute_reward(const StepLosses& losses, bool failed, const RewardWeights& weights) {
  double r = 0.0;
  if (losses.valid) {
    r -= weights.w_v * losses.l_v;
    for (size_t i = 0; i < losses.l_b.size(); ++i)
      r -= (i < weights.w_b.size() ? weights.w_b[i] : 1.0) * losses.l_b[i];
    for (size_t j = 0; j < losses.l_c.size(); ++j)
      r -= (j < weights.w_c.size() ? weights.w_c[j] : 1.0) * losses.l_c[j];
  }
  if (failed) r -= weights.failure_penalty;
  return r;
}

double io_rl_reward(const Vector& y_r_measured, const Vector& mu) {
  return -(y_r_measured - mu).squaredNorm();
}

Vector measured_output_rth_derivative(const dyn::ControlAffinePlant& nominal,
                                      const Vector& x_prev, const Vector& x_curr,
                                      double ts) {
  const int r = nominal.relative_degree();
  const Vector prev = r == 1 ? nominal.h(x_prev) : nominal.lf_h(x_prev, r - 1);
  const Vector curr = r == 1 ? nominal.h(x_curr) : nominal.lf_h(x_curr, r - 1);
  return (curr - prev) / ts;
}

}  // namespace certctl::learn
