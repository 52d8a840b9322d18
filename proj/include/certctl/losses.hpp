#pragma once

#include <vector>

#include "certctl/controllers.hpp"
#include "certctl/trace.hpp"

namespace certctl::learn {

/// Backward difference (v_k - v_{k-1}) / ts; the first entry is NaN
/// (invalid). Throws std::invalid_argument with fewer than 2 samples.
std::vector<double> numerical_derivative(const std::vector<double>& values, double ts);

struct StepLosses {
  double l_v = 0.0;
  std::vector<double> l_b;
  std::vector<double> l_c;
  bool valid = false;
};

struct RewardWeights {
  double w_v = 1.0;
  std::vector<double> w_b;
  std::vector<double> w_c;
  double failure_penalty = 100.0;
  double infeasible_penalty = 1.0;
};

/// Squared errors between measured truths over one executed step and the
/// estimator's values at the executed (x, mu). Truths use trajectory data
/// only: Vdot and B^(r_b) by backward differences of V and L_f^{r_b-1}B
/// (lower-order barrier derivatives are model-independent for mechanical
/// plants), zeta via each spec's measure().
StepLosses compute_step_losses(const ctrl::UncertaintyEstimator& policy,
                               const clf::ResClf& clf,
                               const std::vector<cbf::EcbfPtr>& ecbfs,
                               const std::vector<ctrl::ConstraintPtr>& specs,
                               const dyn::ControlAffinePlant& nominal, const Vector& x,
                               const Vector& mu, const Vector& psi, const Vector& x_next,
                               double ts);

/// Per-step losses over a whole trace; steps whose QP was not optimal are
/// excluded (valid = false).
std::vector<StepLosses> compute_losses(const sim::EpisodeTrace& trace,
                                       const ctrl::UncertaintyEstimator& policy,
                                       const clf::ResClf& clf,
                                       const std::vector<cbf::EcbfPtr>& ecbfs,
                                       const std::vector<ctrl::ConstraintPtr>& specs,
                                       const dyn::ControlAffinePlant& nominal);

/// R = -w_v l_V - sum w_b l_B - sum w_c l_C - (failed ? failure_penalty : 0).
double compute_reward(const StepLosses& losses, bool failed, const RewardWeights& weights);

/// Approach 1 reward: -||y^(r) - mu||^2.
double io_rl_reward(const Vector& y_r_measured, const Vector& mu);

/// Measured y^(r) over one step: backward difference of L_f^{r-1} h.
Vector measured_output_rth_derivative(const dyn::ControlAffinePlant& nominal,
                                      const Vector& x_prev, const Vector& x_curr,
                                      double ts);

}  // namespace certctl::learn
