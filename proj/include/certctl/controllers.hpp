#pragma once

#include <optional>
#include <string>
#include <vector>

#include "certctl/barrier.hpp"
#include "certctl/constraint.hpp"
#include "certctl/estimator.hpp"
#include "certctl/fblin.hpp"
#include "certctl/plant.hpp"
#include "certctl/qp.hpp"

namespace certctl::ctrl {

enum class ControllerVariant { ClfQp, CbfClfQp, IoRlClfQp, RlClfQp, RlCbfClfQp };

ControllerVariant variant_from_string(const std::string& s);
std::string to_string(ControllerVariant v);
bool variant_uses_policy(ControllerVariant v);
bool variant_uses_barriers(ControllerVariant v);

struct ControllerDiagnostics {
  Vector eta;
  double V = 0.0;
  double vdot_estimate = 0.0;  // estimated Vdot at the solved mu
  Vector barrier_values;       // B(x, psi) per barrier
  Vector constraint_values;    // estimated zeta at the solved mu, per row
  double kkt_residual = 0.0;
};

struct ControllerOutput {
  Vector u;     // plant input (clipped to saturation when configured)
  Vector mu;    // auxiliary input
  Vector mu_b;  // estimated B^(r_b) at mu, per barrier
  double d = 0.0;
  linalg::QpStatus qp_status = linalg::QpStatus::Infeasible;
  ControllerDiagnostics diag;
};

/// Everything a controller variant needs besides the state.
struct ControllerSetup {
  dyn::PlantPtr nominal;
  clf::ResClf clf;
  std::vector<cbf::EcbfPtr> barriers;
  std::vector<ConstraintPtr> constraints;
  double relax_penalty = 1e3;        // p in mu^T mu + p d^2
  std::optional<double> u_max;       // symmetric input saturation
  linalg::QpOptions qp_options = {};
};

// ---- estimators over nominal rows -----------------------------------------

/// Vdot-hat = Vdot~(eta, mu) + beta_v + alpha_v . mu.
double estimate_vdot(const UncertaintyEstimator& policy, const clf::ResClf& clf,
                     const dyn::ControlAffinePlant& nominal, const Vector& x,
                     const Vector& mu, const Vector& psi = Vector());

/// B-hat^(r_b) = B~^(r_b)(x, mu, psi) + beta_Bi + alpha_Bi . mu for barrier i.
double estimate_b_deriv(const UncertaintyEstimator& policy, const cbf::Ecbf& ecbf,
                        int barrier_index, const dyn::ControlAffinePlant& nominal,
                        const Vector& x, const Vector& psi, const Vector& mu);

/// zeta-hat = (b_c~ + beta_Cj) + (A_c~ + alpha_Cj) mu for constraint row j.
double estimate_constraint_row(const UncertaintyEstimator& policy,
                               const AffineConstraintSpec& spec, int row_index,
                               const dyn::ControlAffinePlant& nominal, const Vector& x,
                               const Vector& mu, const Vector& psi = Vector());

// ---- QP controllers ---------------------------------------------------------

/// min mu^T mu  s.t.  Vdot~ + (lambda/eps) V <= 0 (plus saturation rows).
ControllerOutput solve_clf_qp(const clf::ResClf& clf, const dyn::ControlAffinePlant& plant,
                              const Vector& x, std::optional<double> u_max = {},
                              const linalg::QpOptions& opts = {});

/// min mu^T mu + p d^2  s.t.  CLF row <= d, per-barrier mu_b + K_b eta_b >= 0
/// with mu_b eliminated through B~^(r_b)(x, mu), and A_c mu + b_c <= 0.
ControllerOutput solve_cbf_clf_qp(const clf::ResClf& clf,
                                  const std::vector<cbf::EcbfPtr>& ecbfs,
                                  const std::vector<ConstraintPtr>& constraints,
                                  const dyn::ControlAffinePlant& plant, const Vector& x,
                                  const Vector& psi, double relax_penalty = 1e3,
                                  std::optional<double> u_max = {},
                                  const linalg::QpOptions& opts = {});

/// CLF-QP with the learned Vdot row.
ControllerOutput solve_rl_clf_qp(const UncertaintyEstimator& policy, const clf::ResClf& clf,
                                 const dyn::ControlAffinePlant& nominal, const Vector& x,
                                 const Vector& psi = Vector(),
                                 std::optional<double> u_max = {},
                                 const linalg::QpOptions& opts = {});

/// Full program with learned CLF, barrier and constraint rows.
ControllerOutput solve_rl_cbf_clf_qp(const UncertaintyEstimator& policy,
                                     const clf::ResClf& clf,
                                     const std::vector<cbf::EcbfPtr>& ecbfs,
                                     const std::vector<ConstraintPtr>& constraints,
                                     const dyn::ControlAffinePlant& nominal,
                                     const Vector& x, const Vector& psi,
                                     double relax_penalty = 1e3,
                                     std::optional<double> u_max = {},
                                     const linalg::QpOptions& opts = {});

/// Approach 1: mu from the plain nominal CLF-QP, then
/// u = u~(x, mu) + D~^{-1} (diag(alpha) mu + beta).
ControllerOutput io_rl_input(const UncertaintyEstimator& policy, const clf::ResClf& clf,
                             const dyn::ControlAffinePlant& nominal, const Vector& x,
                             std::optional<double> u_max = {},
                             const linalg::QpOptions& opts = {});

/// Dispatch by variant; `policy` may be null for the nominal variants.
ControllerOutput run_controller(ControllerVariant variant, const ControllerSetup& setup,
                                const UncertaintyEstimator* policy, const Vector& x,
                                const Vector& psi);

}  // namespace certctl::ctrl
