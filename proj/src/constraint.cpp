#include "certctl/constraint.hpp"

#include <stdexcept>

namespace certctl::ctrl {

OutputAccelBound::OutputAccelBound(double sign, double a_max)
    : AffineConstraintSpec(sign > 0 ? "accel_max" : "accel_min"), sign_(sign), a_max_(a_max) {
  if (a_max <= 0) throw std::invalid_argument("accel bound must be positive");
}

AffineConstraintSpec::Row OutputAccelBound::evaluate(
    const dyn::ControlAffinePlant& plant, const dyn::ControlAffinePlant& nominal,
    const Vector& x) const {
  // y^(r) = L_f^r h + L_g L_f^{r-1} h * (u~*(x) + D~^{-1} mu) on `plant`.
  const dyn::LieDerivatives ld = dyn::lie_derivatives(plant, x);
  const dyn::LieDerivatives nom = dyn::lie_derivatives(nominal, x);
  const Matrix nom_inv = nom.lg_lf_r1_h.fullPivLu().inverse();
  const Vector u_star = -nom_inv * nom.lf_r_h;

  Row row;
  row.a = sign_ * (ld.lg_lf_r1_h * nom_inv).row(0);
  row.b = sign_ * (ld.lf_r_h + ld.lg_lf_r1_h * u_star)(0) - a_max_;
  return row;
}

double OutputAccelBound::measure(const Vector& x_prev, const Vector& x_curr,
                                 double ts) const {
  // Output acceleration from a backward difference of the velocity state.
  const double accel = (x_curr[1] - x_prev[1]) / ts;
  return sign_ * accel - a_max_;
}

std::vector<ConstraintPtr> make_accel_bound_rows(double a_max) {
  return {std::make_shared<OutputAccelBound>(+1.0, a_max),
          std::make_shared<OutputAccelBound>(-1.0, a_max)};
}

}  // namespace certctl::ctrl
