#include "certctl/episode.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "certctl/integrate.hpp"

namespace certctl::sim {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

std::string to_string(TerminationCause c) {
  switch (c) {
    case TerminationCause::Horizon: return "horizon";
    case TerminationCause::Failure: return "failure";
    case TerminationCause::Divergence: return "divergence";
    case TerminationCause::InfeasibilityAbort: return "infeasibility_abort";
  }
  return "unknown";
}

double EpisodeTrace::total_reward() const {
  double s = 0.0;
  for (double r : reward) s += r;
  return s;
}

std::string trace_to_csv(const EpisodeTrace& trace, const std::vector<std::string>& comments) {
  std::ostringstream out;
  for (const auto& c : comments) out << "# " << c << "\n";
  const int n = trace.steps() > 0 ? static_cast<int>(trace.x[0].size()) : 0;
  const int m = trace.steps() > 0 ? static_cast<int>(trace.u[0].size()) : 0;
  const int nb = trace.num_barriers();
  const int nc = trace.num_constraints();

  out << "time";
  for (int i = 0; i < n; ++i) out << ",x" << i;
  for (int i = 0; i < m; ++i) out << ",u" << i;
  for (int i = 0; i < m; ++i) out << ",mu" << i;
  out << ",V,Vdot_meas";
  for (int i = 0; i < nb; ++i) out << ",B_" << i;
  for (int j = 0; j < nc; ++j) out << ",zeta_" << j;
  out << ",d,qp_status\n";

  for (int k = 0; k < trace.steps(); ++k) {
    out << fmt(trace.t[k]);
    for (int i = 0; i < n; ++i) out << "," << fmt(trace.x[k][i]);
    for (int i = 0; i < m; ++i) out << "," << fmt(trace.u[k][i]);
    for (int i = 0; i < m; ++i) out << "," << fmt(trace.mu[k][i]);
    out << "," << fmt(trace.V[k]) << "," << fmt(trace.vdot_meas[k]);
    for (int i = 0; i < nb; ++i) out << "," << fmt(trace.B[k][i]);
    for (int j = 0; j < nc; ++j) out << "," << fmt(trace.zeta_meas[k][j]);
    out << "," << fmt(trace.d[k]) << "," << linalg::to_string(trace.status[k]) << "\n";
  }
  return out.str();
}

int ViolationCounts::total() const {
  int s = clf_steps;
  for (int v : barrier_steps) s += v;
  for (int v : constraint_steps) s += v;
  if (failure) ++s;
  return s;
}

ViolationCounts count_violations(const EpisodeTrace& trace, double clf_rate) {
  ViolationCounts out;
  out.total_steps = trace.steps();
  out.barrier_steps.assign(trace.num_barriers(), 0);
  out.constraint_steps.assign(trace.num_constraints(), 0);
  out.failure = trace.cause == TerminationCause::Failure;

  for (int k = 0; k < trace.steps(); ++k) {
    if (trace.status[k] != linalg::QpStatus::Optimal) ++out.infeasible_steps;
    if (k > 0 && std::isfinite(trace.vdot_meas[k]) &&
        trace.vdot_meas[k] + clf_rate * trace.V[k - 1] > kClfViolationTol)
      ++out.clf_steps;
    for (int i = 0; i < trace.num_barriers(); ++i)
      if (trace.B[k][i] < -kBarrierViolationTol) ++out.barrier_steps[i];
    for (int j = 0; j < trace.num_constraints(); ++j)
      if (std::isfinite(trace.zeta_meas[k][j]) &&
          trace.zeta_meas[k][j] > kZetaViolationTol)
        ++out.constraint_steps[j];
  }
  for (int i = 0; i < static_cast<int>(trace.B_final.size()); ++i)
    if (trace.B_final[i] < -kBarrierViolationTol) ++out.barrier_steps[i];
  for (int v : out.barrier_steps) out.barrier_violated |= v > 0;
  for (int v : out.constraint_steps) out.constraint_violated |= v > 0;
  return out;
}

Vector UniformBox::sample(std::mt19937_64& rng) const {
  Vector out(lo.size());
  for (int i = 0; i < lo.size(); ++i) {
    std::uniform_real_distribution<double> dist(lo[i], hi[i]);
    out[i] = lo[i] == hi[i] ? lo[i] : dist(rng);
  }
  return out;
}

EpisodeTrace run_episode(const dyn::PlantPair& pair, ctrl::ControllerVariant variant,
                         const ctrl::ControllerSetup& setup,
                         const ctrl::UncertaintyEstimator* policy,
                         const learn::RewardWeights& weights, const EpisodeOptions& opts,
                         const Vector& x0, const Vector& psi, std::mt19937_64* noise_rng,
                         const RolloutHooks* hooks) {
  const dyn::ControlAffinePlant& truth = *pair.true_plant;
  const dyn::ControlAffinePlant& nominal = *pair.nominal_plant;
  const int m = nominal.input_dim();
  const int n_b = static_cast<int>(setup.barriers.size());
  const int n_c = static_cast<int>(setup.constraints.size());

  const double steps_exact = opts.horizon / opts.ts;
  const int n_steps = static_cast<int>(std::lround(steps_exact));
  if (std::abs(steps_exact - n_steps) > 1e-9)
    throw std::invalid_argument("horizon must be an integral multiple of ts");

  const bool uses_policy = ctrl::variant_uses_policy(variant);
  if (uses_policy && !policy)
    throw std::invalid_argument("run_episode: variant requires a policy");
  const bool io_rl = variant == ctrl::ControllerVariant::IoRlClfQp;

  // Nominal variants get zero-valued estimates for loss bookkeeping.
  ctrl::PolicyLayout layout;
  layout.m = m;
  layout.n_b = n_b;
  layout.n_c = n_c;
  layout.q = static_cast<int>(psi.size());
  if (uses_policy) layout = policy->layout();
  const ctrl::ZeroEstimator zero_est(layout);

  EpisodeTrace trace;
  trace.ts = opts.ts;
  trace.psi = psi;

  Vector x = x0;
  Vector u_prev = Vector::Zero(m);
  int consec_infeasible = 0;

  auto barrier_values = [&](const Vector& state) {
    Vector vals(n_b);
    for (int i = 0; i < n_b; ++i) vals[i] = setup.barriers[i]->value(state, psi);
    return vals;
  };
  auto clf_v = [&](const Vector& state) {
    return clf::clf_lie_derivatives(setup.clf, clf::transverse(nominal, state).eta).V;
  };
  auto finalize = [&](const Vector& xf, TerminationCause cause) {
    trace.x_final = xf;
    trace.V_final = clf_v(xf);
    trace.B_final = barrier_values(xf);
    trace.cause = cause;
    return trace;
  };

  std::normal_distribution<double> gauss(0.0, 1.0);

  for (int k = 0; k < n_steps; ++k) {
    Vector obs(x.size() + psi.size());
    obs << x, psi;

    // Action for this step; the executed action defines the estimates.
    Vector action;
    const ctrl::UncertaintyEstimator* step_est = nullptr;
    std::optional<ctrl::FixedActionEstimator> fixed;
    if (uses_policy) {
      action = ctrl::pack_outputs(layout, policy->evaluate(x, psi));
      if (hooks && hooks->perturb_action) action = hooks->perturb_action(k, obs, action);
      fixed.emplace(layout, action);
      step_est = &*fixed;
    }

    ctrl::ControllerOutput out;
    try {
      out = ctrl::run_controller(variant, setup, step_est, x, psi);
    } catch (const std::exception& e) {
      throw EpisodeError(e.what(), finalize(x, TerminationCause::Divergence));
    }

    bool aborted = false;
    Vector u_exec;
    Vector mu_exec = out.mu;
    if (out.qp_status == linalg::QpStatus::Optimal) {
      consec_infeasible = 0;
      if (opts.sigma_mu > 0.0 && noise_rng) {
        for (int i = 0; i < m; ++i) mu_exec[i] += opts.sigma_mu * gauss(*noise_rng);
        Vector mapped = mu_exec;
        if (io_rl) {
          const ctrl::EstimatorOutputs est =
              step_est ? step_est->evaluate(x, psi) : zero_est.evaluate(x, psi);
          mapped += est.alpha_v.asDiagonal() * mu_exec + Vector::Constant(m, est.beta_v);
        }
        u_exec = clf::io_linearizing_input(nominal, x, mapped);
        if (setup.u_max) u_exec = u_exec.cwiseMax(-*setup.u_max).cwiseMin(*setup.u_max);
      } else {
        u_exec = out.u;
      }
    } else {
      // Zero-order hold fallback.
      u_exec = u_prev;
      mu_exec = Vector::Zero(m);
      ++consec_infeasible;
      if (consec_infeasible > opts.max_consec_infeasible) aborted = true;
    }

    Vector x_next;
    bool diverged = false;
    try {
      x_next = integrate_step(truth, x, u_exec, opts.ts);
      if (x_next.norm() > opts.divergence_norm) diverged = true;
    } catch (const std::runtime_error&) {
      diverged = true;
      x_next = x;
    }
    const bool failed = !diverged && truth.failure(x_next);

    // Losses/reward for the executed step.
    learn::StepLosses losses;
    double r = 0.0;
    if (out.qp_status == linalg::QpStatus::Optimal && !diverged) {
      const ctrl::UncertaintyEstimator& est_for_losses = step_est ? *step_est : zero_est;
      losses = learn::compute_step_losses(est_for_losses, setup.clf, setup.barriers,
                                          setup.constraints, nominal, x, mu_exec, psi,
                                          x_next, opts.ts);
      if (io_rl) {
        const Vector y_meas =
            learn::measured_output_rth_derivative(nominal, x, x_next, opts.ts);
        r = learn::io_rl_reward(y_meas, mu_exec);
        if (failed || aborted) r -= weights.failure_penalty;
      } else {
        r = learn::compute_reward(losses, failed || aborted, weights);
      }
    } else {
      r = -weights.infeasible_penalty;
      if (failed || aborted || diverged) r -= weights.failure_penalty;
    }

    // Record the row.
    trace.t.push_back(k * opts.ts);
    trace.x.push_back(x);
    trace.u.push_back(u_exec);
    trace.mu.push_back(mu_exec);
    trace.mu_b.push_back(out.mu_b);
    trace.d.push_back(out.d);
    trace.status.push_back(out.qp_status);
    trace.V.push_back(out.diag.V);
    trace.vdot_meas.push_back(k > 0 ? (out.diag.V - trace.V[k - 1]) / opts.ts : kNaN);
    trace.B.push_back(out.diag.barrier_values);
    Vector zrow(n_c);
    for (int j = 0; j < n_c; ++j)
      zrow[j] = k > 0 ? setup.constraints[j]->measure(trace.x[k - 1], x, opts.ts) : kNaN;
    trace.zeta_meas.push_back(zrow);
    trace.reward.push_back(r);

    if (hooks && hooks->on_transition) {
      learn::Transition tr;
      tr.obs = obs;
      tr.action = uses_policy ? action : Vector();
      tr.reward = r;
      tr.next_obs.resize(x_next.size() + psi.size());
      tr.next_obs << x_next, psi;
      tr.terminal = failed || diverged || aborted;
      hooks->on_transition(k, tr, losses);
    }

    u_prev = u_exec;
    x = x_next;
    if (failed) return finalize(x, TerminationCause::Failure);
    if (diverged) return finalize(x, TerminationCause::Divergence);
    if (aborted) return finalize(x, TerminationCause::InfeasibilityAbort);
  }
  return finalize(x, TerminationCause::Horizon);
}

}  // namespace certctl::sim
