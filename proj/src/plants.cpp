#include "certctl/plants.hpp"

#include <cmath>
#include <stdexcept>

namespace certctl::dyn {

UncertaintyMode uncertainty_mode_from_string(const std::string& s) {
  if (s == "none") return UncertaintyMode::None;
  if (s == "scale") return UncertaintyMode::Scale;
  if (s == "payload") return UncertaintyMode::Payload;
  throw std::invalid_argument("unknown uncertainty mode: " + s);
}

std::string to_string(UncertaintyMode mode) {
  switch (mode) {
    case UncertaintyMode::None: return "none";
    case UncertaintyMode::Scale: return "scale";
    case UncertaintyMode::Payload: return "payload";
  }
  return "unknown";
}

namespace {
Vector scalar1(double v) {
  Vector out(1);
  out[0] = v;
  return out;
}
Matrix mat1(double v) {
  Matrix out(1, 1);
  out(0, 0) = v;
  return out;
}
}  // namespace

// ---- InvertedPendulum -------------------------------------------------------

InvertedPendulum::InvertedPendulum(const PlantParams& p)
    : ControlAffinePlant("inverted_pendulum", 2, 1, 2), p_(p) {
  if (p.mass <= 0 || p.length <= 0) throw std::invalid_argument("pendulum: mass/length must be positive");
}

Vector InvertedPendulum::f(const Vector& x) const {
  Vector out(2);
  out[0] = x[1];
  out[1] = (p_.gravity / p_.length) * std::sin(x[0]);
  return out;
}

Matrix InvertedPendulum::g(const Vector& x) const {
  (void)x;
  Matrix out(2, 1);
  out(0, 0) = 0.0;
  out(1, 0) = 1.0 / (p_.mass * p_.length * p_.length);
  return out;
}

Vector InvertedPendulum::h(const Vector& x) const { return scalar1(x[0] - p_.target); }

Vector InvertedPendulum::lf_h(const Vector& x, int k) const {
  if (k == 1) return scalar1(x[1]);
  if (k == 2) return scalar1((p_.gravity / p_.length) * std::sin(x[0]));
  throw std::invalid_argument("pendulum: Lie derivative order out of range");
}

Matrix InvertedPendulum::lg_lf_h(const Vector& x) const { return g(x).bottomRows(1); }

bool InvertedPendulum::failure(const Vector& x) const {
  return std::abs(x[0]) > p_.fail_angle || !x.allFinite();
}

std::pair<Vector, Vector> InvertedPendulum::domain() const {
  Vector lo(2), hi(2);
  lo << -1.2, -3.0;
  hi << 1.2, 3.0;
  return {lo, hi};
}

// ---- DoubleIntegrator -------------------------------------------------------

DoubleIntegrator::DoubleIntegrator(const PlantParams& p)
    : ControlAffinePlant("double_integrator", 2, 1, 2), p_(p) {
  if (p.mass <= 0) throw std::invalid_argument("double integrator: mass must be positive");
}

Vector DoubleIntegrator::f(const Vector& x) const {
  Vector out(2);
  out[0] = x[1];
  out[1] = 0.0;
  return out;
}

Matrix DoubleIntegrator::g(const Vector& x) const {
  (void)x;
  Matrix out(2, 1);
  out(0, 0) = 0.0;
  out(1, 0) = 1.0 / p_.mass;
  return out;
}

Vector DoubleIntegrator::h(const Vector& x) const { return scalar1(x[0] - p_.target); }

Vector DoubleIntegrator::lf_h(const Vector& x, int k) const {
  if (k == 1) return scalar1(x[1]);
  if (k == 2) return scalar1(0.0);
  throw std::invalid_argument("double integrator: Lie derivative order out of range");
}

Matrix DoubleIntegrator::lg_lf_h(const Vector& x) const { (void)x; return mat1(1.0 / p_.mass); }

std::pair<Vector, Vector> DoubleIntegrator::domain() const {
  Vector lo(2), hi(2);
  lo << -2.0, -2.0;
  hi << 2.0, 2.0;
  return {lo, hi};
}

// ---- PlanarCart -------------------------------------------------------------

PlanarCart::PlanarCart(const PlantParams& p)
    : ControlAffinePlant("planar_cart", 2, 1, 2), p_(p) {
  if (p.mass <= 0) throw std::invalid_argument("planar cart: mass must be positive");
}

Vector PlanarCart::f(const Vector& x) const {
  Vector out(2);
  out[0] = x[1];
  out[1] = -(p_.friction / p_.mass) * x[1];
  return out;
}

Matrix PlanarCart::g(const Vector& x) const {
  (void)x;
  Matrix out(2, 1);
  out(0, 0) = 0.0;
  out(1, 0) = 1.0 / p_.mass;
  return out;
}

Vector PlanarCart::h(const Vector& x) const { return scalar1(x[0] - p_.target); }

Vector PlanarCart::lf_h(const Vector& x, int k) const {
  if (k == 1) return scalar1(x[1]);
  if (k == 2) return scalar1(-(p_.friction / p_.mass) * x[1]);
  throw std::invalid_argument("planar cart: Lie derivative order out of range");
}

Matrix PlanarCart::lg_lf_h(const Vector& x) const { (void)x; return mat1(1.0 / p_.mass); }

std::pair<Vector, Vector> PlanarCart::domain() const {
  Vector lo(2), hi(2);
  lo << -2.0, -2.0;
  hi << 2.0, 2.0;
  return {lo, hi};
}

// ---- factories --------------------------------------------------------------

PlantPtr make_plant(const std::string& id, const PlantParams& params) {
  if (id == "inverted_pendulum") return std::make_shared<InvertedPendulum>(params);
  if (id == "double_integrator") return std::make_shared<DoubleIntegrator>(params);
  if (id == "planar_cart") return std::make_shared<PlanarCart>(params);
  throw std::invalid_argument("unknown plant: " + id);
}

PlantPair make_plant_pair(const std::string& id, const PlantParams& params,
                          UncertaintyMode mode, double amount) {
  PlantParams true_params = params;
  switch (mode) {
    case UncertaintyMode::None:
      break;
    case UncertaintyMode::Scale:
      if (amount <= 0) throw std::invalid_argument("scale uncertainty must be positive");
      true_params.mass = params.mass * amount;
      break;
    case UncertaintyMode::Payload:
      if (params.mass * (1.0 + amount) <= 0)
        throw std::invalid_argument("payload makes mass nonpositive");
      true_params.mass = params.mass * (1.0 + amount);
      break;
  }
  return PlantPair(make_plant(id, true_params), make_plant(id, params));
}

}  // namespace certctl::dyn
