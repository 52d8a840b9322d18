#include "certctl/barrier.hpp"

#include <stdexcept>

#include "certctl/fblin.hpp"

namespace certctl::cbf {

RowVector pole_place_kb(const std::vector<double>& poles) {
  const std::vector<double> coeffs = clf::monic_from_poles(poles);
  RowVector kb(coeffs.size());
  for (size_t i = 0; i < coeffs.size(); ++i) kb[static_cast<int>(i)] = coeffs[i];
  return kb;
}

Vector barrier_eta(const Ecbf& ecbf, const dyn::ControlAffinePlant& plant,
                   const Vector& x, const Vector& psi) {
  const int rb = ecbf.relative_degree();
  Vector eta(rb);
  eta[0] = ecbf.value(x, psi);
  for (int k = 1; k < rb; ++k) eta[k] = ecbf.lf_b(plant, x, psi, k);
  return eta;
}

std::pair<double, RowVector> barrier_virtual_terms(const Ecbf& ecbf,
                                                   const dyn::ControlAffinePlant& plant,
                                                   const Vector& x, const Vector& psi) {
  return {ecbf.lf_b(plant, x, psi, ecbf.relative_degree()), ecbf.lg_lf_b(plant, x, psi)};
}

namespace {
void check_mechanical(const dyn::ControlAffinePlant& plant, const Vector& x) {
  if (plant.state_dim() != 2)
    throw std::invalid_argument("barrier assumes a 2-state mechanical plant");
  if (plant.g(x).row(0).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("barrier assumes g(x) has zero kinematic row");
}
}  // namespace

// ---- PositionBoundBarrier -----------------------------------------------

PositionBoundBarrier::PositionBoundBarrier(double sign, double fixed_bound,
                                           bool bound_from_psi, RowVector k_b,
                                           std::string name)
    : Ecbf(std::move(name), 2, bound_from_psi ? 1 : 0, std::move(k_b)),
      sign_(sign),
      fixed_bound_(fixed_bound),
      from_psi_(bound_from_psi) {}

double PositionBoundBarrier::bound(const Vector& psi) const {
  if (!from_psi_) return fixed_bound_;
  if (psi.size() < 1) throw std::invalid_argument("barrier expects psi[0] as bound");
  return psi[0];
}

double PositionBoundBarrier::value(const Vector& x, const Vector& psi) const {
  return sign_ * (x[0] - bound(psi));
}

double PositionBoundBarrier::lf_b(const dyn::ControlAffinePlant& plant, const Vector& x,
                                  const Vector& psi, int k) const {
  (void)psi;
  check_mechanical(plant, x);
  const Vector fx = plant.f(x);
  if (k == 1) return sign_ * fx[0];  // sign * velocity
  if (k == 2) return sign_ * fx[1];  // sign * drift acceleration
  throw std::invalid_argument("position barrier: order out of range");
}

RowVector PositionBoundBarrier::lg_lf_b(const dyn::ControlAffinePlant& plant,
                                        const Vector& x, const Vector& psi) const {
  (void)psi;
  check_mechanical(plant, x);
  return sign_ * plant.g(x).row(1);
}

// ---- AngleBoxBarrier ------------------------------------------------------

AngleBoxBarrier::AngleBoxBarrier(double theta_max, RowVector k_b)
    : Ecbf("angle_box", 2, 0, std::move(k_b)), theta_max_(theta_max) {
  if (theta_max <= 0) throw std::invalid_argument("angle_box: theta_max must be positive");
}

double AngleBoxBarrier::value(const Vector& x, const Vector& psi) const {
  (void)psi;
  return theta_max_ * theta_max_ - x[0] * x[0];
}

double AngleBoxBarrier::lf_b(const dyn::ControlAffinePlant& plant, const Vector& x,
                             const Vector& psi, int k) const {
  (void)psi;
  check_mechanical(plant, x);
  const Vector fx = plant.f(x);
  if (k == 1) return -2.0 * x[0] * fx[0];
  // d/dt(-2 theta thetadot) along f: -2 thetadot^2 - 2 theta * f1.
  if (k == 2) return -2.0 * fx[0] * fx[0] - 2.0 * x[0] * fx[1];
  throw std::invalid_argument("angle_box: order out of range");
}

RowVector AngleBoxBarrier::lg_lf_b(const dyn::ControlAffinePlant& plant, const Vector& x,
                                   const Vector& psi) const {
  (void)psi;
  check_mechanical(plant, x);
  return -2.0 * x[0] * plant.g(x).row(1);
}

// ---- factory ----------------------------------------------------------------

EcbfPtr make_barrier(const std::string& type, double bound, bool bound_from_psi,
                     const std::vector<double>& poles) {
  RowVector kb = pole_place_kb(poles);
  if (type == "position_max")
    return std::make_shared<PositionBoundBarrier>(-1.0, bound, bound_from_psi, kb, "position_max");
  if (type == "position_min")
    return std::make_shared<PositionBoundBarrier>(+1.0, bound, bound_from_psi, kb, "position_min");
  if (type == "angle_box") {
    if (bound_from_psi) throw std::invalid_argument("angle_box does not take psi");
    return std::make_shared<AngleBoxBarrier>(bound, kb);
  }
  throw std::invalid_argument("unknown barrier type: " + type);
}

}  // namespace certctl::cbf
