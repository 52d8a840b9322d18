#pragma once

#include <string>
#include <vector>

#include "certctl/config.hpp"

namespace certctl::selftest {

/// Independent QP oracle: FISTA-accelerated projected gradient on the dual
/// (lambda >= 0 projection). Returns the primal objective at v(lambda); sets
/// `feasible` false when the dual iterates diverge (primal infeasible).
double pgd_qp_objective(const linalg::QpProblem& qp, int iters, bool* feasible = nullptr);

/// Max |mu_rl(zero policy) - mu_nominal| over `samples` states drawn from the
/// plant's domain box; covers both the RL-CLF-QP and RL-CBF-CLF-QP reductions.
double zero_policy_gap(const cli::Assembled& a, ctrl::ControllerVariant rl_variant,
                       int samples, std::uint64_t seed);

struct OracleCheck {
  double max_v_err = 0.0, v_bound = 0.0;
  double max_b_err = 0.0, b_bound = 0.0;
  double max_c_err = 0.0, c_bound = 0.0;
  int checked_steps = 0;
  bool pass() const {
    return max_v_err <= v_bound && max_b_err <= b_bound && max_c_err <= c_bound;
  }
};

/// Runs `episodes` closed-loop episodes with the analytic-mismatch oracle
/// substituted for the network and compares every estimator against
/// numerically differentiated truth, at 2x the empirical backward-difference
/// error bound (Ts/2 * max |second derivative|, per trace).
OracleCheck check_oracle_estimators(const cli::Assembled& a,
                                    ctrl::ControllerVariant variant, int episodes,
                                    std::uint64_t seed);

struct PropertyResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Built-in oracle-equivalence / zero-policy / solver property suite.
std::vector<PropertyResult> run_selftest();

}  // namespace certctl::selftest
