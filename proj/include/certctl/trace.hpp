#pragma once

#include <string>
#include <vector>

#include "certctl/qp.hpp"
#include "certctl/types.hpp"

namespace certctl::sim {

enum class TerminationCause { Horizon, Failure, Divergence, InfeasibilityAbort };

std::string to_string(TerminationCause c);

// Violation tolerances used uniformly by trace analysis and the harness.
inline constexpr double kBarrierViolationTol = 1e-6;   // B < -tol
inline constexpr double kZetaViolationTol = 1e-6;      // zeta_meas > tol
inline constexpr double kClfViolationTol = 1e-2;       // Vdot_meas + rate V > tol

/// One recorded row per executed control step; derivative-style columns
/// (Vdot_meas, zeta_meas) are backward differences and NaN on the first row.
/// The terminal state is kept as a trailing snapshot so the last step's
/// losses stay computable.
struct EpisodeTrace {
  double ts = 0.01;
  Vector psi;

  std::vector<double> t;
  std::vector<Vector> x;
  std::vector<Vector> u;
  std::vector<Vector> mu;        // executed auxiliary input (noise included)
  std::vector<Vector> mu_b;      // n_b entries per row
  std::vector<double> d;
  std::vector<linalg::QpStatus> status;
  std::vector<double> V;
  std::vector<double> vdot_meas;
  std::vector<Vector> B;          // n_b entries per row
  std::vector<Vector> zeta_meas;  // n_c entries per row
  std::vector<double> reward;

  Vector x_final;
  double V_final = 0.0;
  Vector B_final;

  TerminationCause cause = TerminationCause::Horizon;

  int steps() const { return static_cast<int>(t.size()); }
  int num_barriers() const { return steps() > 0 ? static_cast<int>(B[0].size()) : 0; }
  int num_constraints() const {
    return steps() > 0 ? static_cast<int>(zeta_meas[0].size()) : 0;
  }
  double total_reward() const;
};

/// CSV body with the fixed column convention
/// time, x0.., u0.., mu0.., V, Vdot_meas, B_i, zeta_j, d, qp_status.
/// `comment` lines (if any) are emitted first, prefixed with "# ".
std::string trace_to_csv(const EpisodeTrace& trace,
                         const std::vector<std::string>& comments = {});

struct ViolationCounts {
  int clf_steps = 0;
  std::vector<int> barrier_steps;
  std::vector<int> constraint_steps;
  int infeasible_steps = 0;
  int total_steps = 0;
  bool failure = false;
  bool barrier_violated = false;     // any barrier, any step (incl. terminal)
  bool constraint_violated = false;  // any row, any step

  int total() const;
  double infeasibility_rate() const {
    return total_steps > 0 ? double(infeasible_steps) / double(total_steps) : 0.0;
  }
};

/// Counts against the fixed tolerances above; `clf_rate` is lambda/epsilon.
ViolationCounts count_violations(const EpisodeTrace& trace, double clf_rate);

}  // namespace certctl::sim
