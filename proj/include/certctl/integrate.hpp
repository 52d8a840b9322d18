#pragma once

#include "certctl/plant.hpp"

namespace certctl::sim {

/// Classical fixed-step RK4 on x' = f(x) + g(x) u with u held constant over
/// the step. Throws std::runtime_error("diverged") on non-finite states.
Vector integrate_step(const dyn::ControlAffinePlant& plant, const Vector& x,
                      const Vector& u, double dt);

}  // namespace certctl::sim
