#pragma once

#include <string>

#include "certctl/plant.hpp"

namespace certctl::dyn {

/// Physical parameters of the benchmark plants. Unused fields are ignored by
/// plants that don't have them.
struct PlantParams {
  double mass = 1.0;
  double length = 1.0;    // pendulum
  double gravity = 9.8;   // pendulum
  double friction = 0.5;  // planar cart viscous coefficient
  double target = 0.0;    // output target (theta_d / y_d)
  double fail_angle = M_PI / 2;  // pendulum failure threshold
};

enum class UncertaintyMode { None, Scale, Payload };

UncertaintyMode uncertainty_mode_from_string(const std::string& s);
std::string to_string(UncertaintyMode mode);

/// Pendulum: x = [theta, theta_dot], theta'' = (g0/l) sin(theta) + u/(m l^2),
/// h = theta - theta_d. n=2, m=1, r=2. Fails when |theta| > fail_angle.
class InvertedPendulum final : public ControlAffinePlant {
 public:
  explicit InvertedPendulum(const PlantParams& p);
  Vector f(const Vector& x) const override;
  Matrix g(const Vector& x) const override;
  Vector h(const Vector& x) const override;
  Vector lf_h(const Vector& x, int k) const override;
  Matrix lg_lf_h(const Vector& x) const override;
  bool failure(const Vector& x) const override;
  std::pair<Vector, Vector> domain() const override;

 private:
  PlantParams p_;
};

/// Double integrator: x = [y, v], y'' = u/m, h = y - y_d.
class DoubleIntegrator final : public ControlAffinePlant {
 public:
  explicit DoubleIntegrator(const PlantParams& p);
  Vector f(const Vector& x) const override;
  Matrix g(const Vector& x) const override;
  Vector h(const Vector& x) const override;
  Vector lf_h(const Vector& x, int k) const override;
  Matrix lg_lf_h(const Vector& x) const override;
  std::pair<Vector, Vector> domain() const override;

 private:
  PlantParams p_;
};

/// Planar cart with viscous friction: x = [y, v], y'' = (u - b v)/m, h = y - y_d.
class PlanarCart final : public ControlAffinePlant {
 public:
  explicit PlanarCart(const PlantParams& p);
  Vector f(const Vector& x) const override;
  Matrix g(const Vector& x) const override;
  Vector h(const Vector& x) const override;
  Vector lf_h(const Vector& x, int k) const override;
  Matrix lg_lf_h(const Vector& x) const override;
  std::pair<Vector, Vector> domain() const override;

 private:
  PlantParams p_;
};

/// Known ids: "inverted_pendulum", "double_integrator", "planar_cart".
/// Throws std::invalid_argument("unknown plant") otherwise.
PlantPtr make_plant(const std::string& id, const PlantParams& params);

/// Builds (true, nominal) where the nominal plant uses `params` as given and
/// the true plant perturbs the mass: Scale -> mass * amount,
/// Payload -> mass * (1 + amount), None -> identical plants.
PlantPair make_plant_pair(const std::string& id, const PlantParams& params,
                          UncertaintyMode mode, double amount);

}  // namespace certctl::dyn
