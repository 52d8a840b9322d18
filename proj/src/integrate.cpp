#include "certctl/integrate.hpp"

#include <stdexcept>

namespace certctl::sim {

Vector integrate_step(const dyn::ControlAffinePlant& plant, const Vector& x,
                      const Vector& u, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("integrate_step: dt must be positive");
  auto deriv = [&](const Vector& s) { return dyn::true_derivative(plant, s, u); };
  const Vector k1 = deriv(x);
  const Vector k2 = deriv(x + 0.5 * dt * k1);
  const Vector k3 = deriv(x + 0.5 * dt * k2);
  const Vector k4 = deriv(x + dt * k3);
  Vector next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) throw std::runtime_error("diverged");
  return next;
}

}  // namespace certctl::sim
