#pragma once

#include <vector>

#include "certctl/plant.hpp"
#include "certctl/types.hpp"

namespace certctl::clf {

/// Transverse coordinates eta = [h; L_f h; ...; L_f^{r-1} h] with the full
/// state carried alongside (zero-dynamics coordinates are never constructed).
struct TransverseState {
  Vector eta;
  Vector x;
};

TransverseState transverse(const dyn::ControlAffinePlant& plant, const Vector& x);

/// u = u*(x) + (L_g L_f^{r-1} h)^{-1} mu; applied to the same plant this
/// renders y^(r) = mu.
Vector io_linearizing_input(const dyn::ControlAffinePlant& plant, const Vector& x,
                            const Vector& mu);

/// Companion-form (F, G) of the transverse dynamics, mr x mr and mr x m.
void make_fg(int m, int r, Matrix& f, Matrix& g);

/// Coefficients a_0..a_{r-1} of the monic polynomial with the given real
/// negative roots: s^r + a_{r-1} s^{r-1} + ... + a_0.
std::vector<double> monic_from_poles(const std::vector<double>& poles);

/// Rapidly exponentially stabilizing CLF V_eps(eta) = eta^T P_eps eta.
struct ResClf {
  Matrix P_eps;
  Matrix K;  // m x mr, epsilon-scaled gains
  Matrix F, G, A;
  Matrix Q;
  double epsilon = 1.0;
  double lambda = 0.0;
  double c1 = 0.0;            // lambda_min(P_eps)
  double c2_over_eps2 = 0.0;  // lambda_max(P_eps)
  int m = 0, r = 0;

  int eta_dim() const { return m * r; }
  /// Decay coefficient lambda/epsilon used in the CLF constraint row.
  double rate() const { return lambda / epsilon; }
};

/// Assembles K per the epsilon-scaled pole-placement law (block j of K is
/// -a_j / eps^{r-j} I_m) and P_eps from the Lyapunov equation on A = F + G K.
/// lambda <= 0 selects the default 0.5 * lmin(Q)/lmax(P_eps).
/// Throws on eps outside (0, 1], non-Hurwitz closed loop, or bad poles.
ResClf build_res_clf(int m, int r, const std::vector<double>& poles, double epsilon,
                     double lambda, const Matrix& q);

struct ClfDerivatives {
  double V = 0.0;
  double LfV = 0.0;
  RowVector LgV;  // 1 x m
};

/// V = eta^T P eta, LfV = eta^T (F^T P + P F) eta, LgV = 2 eta^T P G.
ClfDerivatives clf_lie_derivatives(const ResClf& clf, const Vector& eta);

/// Nominal model Vdot for a given auxiliary input.
inline double vdot_nominal(const ClfDerivatives& d, const Vector& mu) {
  return d.LfV + (d.LgV * mu)(0);
}

}  // namespace certctl::clf
